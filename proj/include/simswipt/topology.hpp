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

#include "channel.hpp"

namespace simswipt
{

struct TopologyParams
{
    int aps = 4;               // M
    int info_rx = 2;           // K_I
    int energy_rx = 2;         // K_E
    double area = 100.0;       // side of the square [m]
    double ap_height = 15.0;   // [m]
    double rx_height = 1.65;   // [m]
    double kappa = 5.0;
    PathLossModel pathloss;
};

// Receivers are ordered IRs first (0..K_I-1), then ERs
struct Topology
{
    int aps = 0, info_rx = 0, energy_rx = 0;
    double kappa = 0.0;
    std::vector<Point3> ap_pos;
    std::vector<Point3> rx_pos;
    RMat beta;                         // M x K
    std::vector<std::vector<CVec>> los; // [m][k], length S

    int receivers() const { return info_rx + energy_rx; }

    RiceanLink link(int m, int k) const { return {beta(m, k), kappa, los[m][k]}; }
    double norm_gain(int m, int k) const { return beta(m, k) / (1.0 + kappa); }

    void set_kappa(double k)
    {
        if (k < 0.0)
            throw std::invalid_argument("Ricean factor must be non-negative");
        kappa = k;
    }
};

inline Topology generate_topology(const TopologyParams &p, const SimGeometry &geom, CounterRng &rng)
{
    if (p.aps < 1 || p.info_rx < 0 || p.energy_rx < 0 || p.info_rx + p.energy_rx < 1)
        throw std::invalid_argument("topology needs at least one AP and one receiver");
    Topology t;
    t.aps = p.aps;
    t.info_rx = p.info_rx;
    t.energy_rx = p.energy_rx;
    t.kappa = p.kappa;
    const int K = t.receivers();
    for (int m = 0; m < p.aps; ++m)
    {
        double x = uniform(rng, 0.0, p.area), y = uniform(rng, 0.0, p.area);
        t.ap_pos.push_back({x, y, p.ap_height});
    }
    for (int k = 0; k < K; ++k)
    {
        double x = uniform(rng, 0.0, p.area), y = uniform(rng, 0.0, p.area);
        t.rx_pos.push_back({x, y, p.rx_height});
    }
    t.beta.resize(p.aps, K);
    t.los.assign(p.aps, std::vector<CVec>(K));
    for (int m = 0; m < p.aps; ++m)
        for (int k = 0; k < K; ++k)
        {
            const Point3 &a = t.ap_pos[m], &r = t.rx_pos[k];
            double d = std::sqrt((a[0] - r[0]) * (a[0] - r[0]) + (a[1] - r[1]) * (a[1] - r[1]) + (a[2] - r[2]) * (a[2] - r[2]));
            t.beta(m, k) = p.pathloss.shadowed_gain(d, rng);
            t.los[m][k] = los_steering(geom, a, r);
        }
    return t;
}

} // namespace simswipt
