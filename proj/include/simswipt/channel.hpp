// SPDX-License-Identifier: Apache-2.0
//
// simswipt: simulation toolkit for SIM-assisted cell-free massive MIMO SWIPT
// Copyright (C) 2026 The simswipt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "rng.hpp"
#include "types.hpp"

#include <array>
#include <stdexcept>

namespace simswipt
{

// Stacked metasurface in front of an N-antenna ULA. Elements sit on a cols x rows grid
// (cols along y, rows along z); element s (1-based) is at column mod(s-1, cols)+1 and row ceil(s/cols).
struct SimGeometry
{
    int elements = 16;             // S
    int rows = 4;                  // S_z
    int layers = 2;                // L
    int antennas = 32;             // N
    double wavelength = 0.0857;    // [m]
    double element_spacing = 0.0;  // d_PS [m]
    double antenna_spacing = 0.0;  // ULA pitch [m]
    double thickness = 0.0;        // T_SIM [m]

    static SimGeometry make(int S, int rows, int L, int N, double wavelength, double thickness_wl,
                            double spacing_wl = 0.5)
    {
        SimGeometry g;
        g.elements = S;
        g.rows = rows;
        g.layers = L;
        g.antennas = N;
        g.wavelength = wavelength;
        g.element_spacing = spacing_wl * wavelength;
        g.antenna_spacing = 0.5 * wavelength;
        g.thickness = thickness_wl * wavelength;
        g.validate();
        return g;
    }

    int cols() const { return elements / rows; }
    double layer_spacing() const { return thickness / layers; }
    int row_of(int s) const { return (s + cols() - 1) / cols(); }
    int col_of(int s) const { return (s - 1) % cols() + 1; }

    void validate() const
    {
        if (elements < 1 || rows < 1 || elements % rows != 0)
            throw std::invalid_argument("element count must be a positive multiple of the row count");
        if (layers < 1 || antennas < 1)
            throw std::invalid_argument("layer and antenna counts must be positive");
        if (!(element_spacing > 0.0) || !(wavelength > 0.0))
            throw std::invalid_argument("element spacing and wavelength must be positive");
        if (!(thickness > 0.0))
            throw std::invalid_argument("layer spacing must be positive");
    }
};

inline double inter_element_distance(int s, int s2, const SimGeometry &geom)
{
    double dz = geom.row_of(s) - geom.row_of(s2);
    double dy = geom.col_of(s) - geom.col_of(s2);
    double transverse = geom.element_spacing * std::sqrt(dz * dz + dy * dy);
    double ds = geom.layer_spacing();
    return std::sqrt(transverse * transverse + ds * ds);
}

// Diffraction coefficient between two elements at distance d across a gap of layer_spacing
inline cplx rs_coefficient(double d, double layer_spacing, double wavelength)
{
    if (!(layer_spacing > 0.0))
        throw std::invalid_argument("layer spacing must be positive");
    double cos_chi = layer_spacing / d;
    cplx amp = (wavelength * wavelength * cos_chi / (4.0 * d)) * cplx(1.0 / (two_pi * d), -1.0 / wavelength);
    return amp * std::polar(1.0, two_pi * d / wavelength);
}

// S x S propagation between two consecutive metasurfaces
inline CMat inter_layer_matrix(const SimGeometry &geom)
{
    const int S = geom.elements;
    CMat H(S, S);
    for (int s = 1; s <= S; ++s)
        for (int s2 = 1; s2 <= S; ++s2)
            H(s - 1, s2 - 1) = rs_coefficient(inter_element_distance(s, s2, geom), geom.layer_spacing(), geom.wavelength);
    return H;
}

// S x N propagation from the antenna array to the first metasurface. The ULA runs along y,
// centred under the surface one layer spacing away.
inline CMat antenna_layer_matrix(const SimGeometry &geom)
{
    const int S = geom.elements, N = geom.antennas;
    const double ds = geom.layer_spacing();
    CMat H(S, N);
    for (int s = 1; s <= S; ++s)
    {
        double ey = geom.element_spacing * (geom.col_of(s) - 0.5 * (geom.cols() + 1));
        double ez = geom.element_spacing * (geom.row_of(s) - 0.5 * (geom.rows + 1));
        for (int n = 1; n <= N; ++n)
        {
            double ay = geom.antenna_spacing * (n - 0.5 * (N + 1));
            double d = std::sqrt((ey - ay) * (ey - ay) + ez * ez + ds * ds);
            H(s - 1, n - 1) = rs_coefficient(d, ds, geom.wavelength);
        }
    }
    return H;
}

inline double spectral_norm(const CMat &A)
{
    Eigen::JacobiSVD<CMat> svd(A);
    return svd.singularValues()(0);
}

// Propagation matrices are identical for every AP since all SIMs share one geometry
struct SimPropagation
{
    CMat first; // S x N
    CMat inter; // S x S, used for layers 2..L

    static SimPropagation build(const SimGeometry &geom)
    {
        return {antenna_layer_matrix(geom), inter_layer_matrix(geom)};
    }
};

struct PassivityReport
{
    double first_norm = 0.0;
    double inter_norm = 0.0; // 0 when L = 1
    bool passive = false;    // every layer matrix has spectral norm below one
};

inline PassivityReport passivity(const SimGeometry &geom, const SimPropagation &prop)
{
    PassivityReport r;
    r.first_norm = spectral_norm(prop.first);
    r.inter_norm = geom.layers > 1 ? spectral_norm(prop.inter) : 0.0;
    r.passive = r.first_norm < 1.0 && r.inter_norm < 1.0;
    return r;
}

struct Cascade
{
    CMat F;                  // S x N
    double gram_trace = 0.0; // tr(F F^H)
};

// F = Phi^L H^L ... Phi^1 H^1 with phases given as an L x S block (row l = layer l+1)
inline Cascade sim_cascade(const SimPropagation &prop, const RMat &phases)
{
    const Eigen::Index S = prop.inter.rows();
    if (phases.cols() != S || prop.first.rows() != S || phases.rows() < 1)
        throw std::invalid_argument("phase block does not match the metasurface size");
    Cascade c;
    CVec d(S);
    for (Eigen::Index s = 0; s < S; ++s)
        d[s] = std::polar(1.0, phases(0, s));
    c.F = d.asDiagonal() * prop.first;
    for (Eigen::Index l = 1; l < phases.rows(); ++l)
    {
        for (Eigen::Index s = 0; s < S; ++s)
            d[s] = std::polar(1.0, phases(l, s));
        c.F = d.asDiagonal() * (prop.inter * c.F);
    }
    c.gram_trace = c.F.squaredNorm();
    return c;
}

// Unit-modulus LoS response of the last layer seen under elevation chi and azimuth eps
inline CVec los_steering(const SimGeometry &geom, double elevation, double azimuth)
{
    const double k = two_pi * geom.element_spacing / geom.wavelength;
    CVec z(geom.elements);
    for (int s = 1; s <= geom.elements; ++s)
    {
        double phase = k * (geom.row_of(s) * std::sin(elevation) + geom.col_of(s) * std::sin(azimuth) * std::cos(elevation));
        z[s - 1] = std::polar(1.0, phase);
    }
    return z;
}

using Point3 = std::array<double, 3>;

// Angles from the last-layer centre to the receiver: elevation below the horizon, azimuth in the ground plane
inline CVec los_steering(const SimGeometry &geom, const Point3 &surface, const Point3 &receiver)
{
    double dx = receiver[0] - surface[0], dy = receiver[1] - surface[1], dz = surface[2] - receiver[2];
    double horizontal = std::hypot(dx, dy);
    if (horizontal == 0.0 && dz == 0.0)
        throw std::invalid_argument("receiver coincides with the metasurface");
    return los_steering(geom, std::atan2(dz, horizontal), std::atan2(dy, dx));
}

// Three-slope model with log-normal shadowing beyond the far breakpoint
struct PathLossModel
{
    double ref_loss_db = 140.7;  // at 1 km
    double d0 = 10.0;            // [m]
    double d1 = 50.0;            // [m]
    double far_slope_db = 35.0;  // dB per decade beyond d1
    double shadow_db = 8.0;

    // Path loss in dB (negative gain), shadowing excluded
    double gain_db(double distance_m) const
    {
        if (!(distance_m > 0.0))
            throw std::invalid_argument("distance must be positive");
        const double dk = distance_m / 1000.0, d0k = d0 / 1000.0, d1k = d1 / 1000.0;
        const double mid = far_slope_db - 20.0;
        if (dk > d1k)
            return -ref_loss_db - far_slope_db * std::log10(dk);
        if (dk > d0k)
            return -ref_loss_db - mid * std::log10(d1k) - 20.0 * std::log10(dk);
        return -ref_loss_db - mid * std::log10(d1k) - 20.0 * std::log10(d0k);
    }

    double gain(double distance_m) const { return db_to_linear(gain_db(distance_m)); }

    double shadowed_gain(double distance_m, CounterRng &rng) const
    {
        double db = gain_db(distance_m);
        if (distance_m > d1)
            db += shadow_db * standard_normal(rng);
        return db_to_linear(db);
    }
};

inline double three_slope_pathloss(double distance_m, const PathLossModel &model = {})
{
    return model.gain(distance_m);
}

struct RiceanLink
{
    double beta = 0.0;  // large-scale gain
    double kappa = 0.0; // Ricean factor
    CVec los;           // unit-modulus, length S

    double norm_gain() const { return beta / (1.0 + kappa); }
};

struct ChannelRealization
{
    CVec z; // S, last layer to receiver
    CVec g; // N, effective F^H z
};

inline CVec channel_mean(const RiceanLink &link, const CMat &F)
{
    return std::sqrt(link.norm_gain() * link.kappa) * (F.adjoint() * link.los);
}

inline ChannelRealization sample_channel(const RiceanLink &link, const CMat &F, CounterRng &rng)
{
    ChannelRealization r;
    const double bb = link.norm_gain();
    r.z = std::sqrt(bb) * (std::sqrt(link.kappa) * link.los + complex_normal(rng, link.los.size()));
    r.g = F.adjoint() * r.z;
    return r;
}

} // namespace simswipt
