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

#include "estimation.hpp"
#include "stats.hpp"

namespace simswipt
{

// Columns U = G (G^H G)^{-1}; column k is the unnormalised ZF direction of IR k
inline CMat zf_directions(const CMat &Ginfo)
{
    const Eigen::Index N = Ginfo.rows(), K = Ginfo.cols();
    if (K == 0)
        return CMat(N, 0);
    if (N < K)
        throw RankError("zero-forcing needs at least as many antennas as IRs");
    CMat gram = Ginfo.adjoint() * Ginfo;
    Eigen::LLT<CMat> llt(gram);
    double floor = 1e-13 * gram.trace().real();
    if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().real().minCoeff() <= std::sqrt(floor))
        throw RankError("IR estimates are collinear");
    return Ginfo * llt.solve(CMat::Identity(K, K));
}

inline CVec zf_precoder(const CMat &Ginfo, int k, double alpha)
{
    return alpha * zf_directions(Ginfo).col(k);
}

// Orthogonal projector onto the complement of span(Ginfo), via Householder QR
inline CMat null_projector(const CMat &Ginfo)
{
    const Eigen::Index N = Ginfo.rows(), K = Ginfo.cols();
    CMat B = CMat::Identity(N, N);
    if (K == 0)
        return B;
    if (N <= K)
        throw RankError("protective MRT needs more antennas than IRs");
    Eigen::HouseholderQR<CMat> qr(Ginfo);
    CMat R = qr.matrixQR().topRows(K).triangularView<Eigen::Upper>();
    double scale = Ginfo.norm();
    for (Eigen::Index i = 0; i < K; ++i)
        if (std::abs(R(i, i)) <= 1e-12 * scale)
            throw RankError("IR estimates are collinear");
    CMat Q = qr.householderQ() * CMat::Identity(N, K);
    B -= Q * Q.adjoint();
    return B;
}

inline CVec pmrt_precoder(const CMat &Ginfo, const CVec &ghat_energy, double alpha)
{
    return alpha * (null_projector(Ginfo) * ghat_energy);
}

// E{G^H G} over the IR estimates of one AP
inline CMat info_gram_moment(const ApStatistics &st, const PilotPlan &plan, int info_rx)
{
    CMat W(info_rx, info_rx);
    for (int j = 0; j < info_rx; ++j)
        for (int l = 0; l < info_rx; ++l)
            W(j, l) = st.link[j].mean.dot(st.link[l].mean) + st.estimate_cross_cov(l, j, plan).trace();
    return W;
}

// ([E{G^H G}^{-1}]_kk)^{-1/2} per IR of one AP
inline RVec alpha_zf_approx(const ApStatistics &st, const PilotPlan &plan, int info_rx)
{
    RVec a(info_rx);
    if (info_rx == 0)
        return a;
    CMat W = info_gram_moment(st, plan, info_rx);
    Eigen::LDLT<CMat> ldlt(W);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw RankError("singular IR Gram moment");
    CMat Winv = ldlt.solve(CMat::Identity(info_rx, info_rx));
    for (int k = 0; k < info_rx; ++k)
    {
        double d = Winv(k, k).real();
        if (!(d > 0.0) || !std::isfinite(d))
            throw RankError("singular IR Gram moment");
        a[k] = 1.0 / std::sqrt(d);
    }
    return a;
}

// (E{||g_hat_e||^2})^{-1/2} per ER of one AP
inline RVec alpha_pmrt_approx(const ApStatistics &st, int info_rx, int energy_rx)
{
    RVec a(energy_rx);
    for (int e = 0; e < energy_rx; ++e)
    {
        const LinkEstimate &le = st.link[info_rx + e];
        a[e] = 1.0 / std::sqrt(le.mean.squaredNorm() + le.quality);
    }
    return a;
}

// Normalisation factors; precoders are alpha times the unnormalised direction
struct Normalization
{
    RMat zf;   // M x K_I
    RMat pmrt; // M x K_E
    RMat zf_se;
    RMat pmrt_se;
};

inline Normalization alpha_approx(const NetworkStatistics &ns)
{
    Normalization n;
    const int M = ns.aps();
    n.zf.resize(M, ns.info_rx);
    n.pmrt.resize(M, ns.energy_rx);
    n.zf_se = RMat::Zero(M, ns.info_rx);
    n.pmrt_se = RMat::Zero(M, ns.energy_rx);
    for (int m = 0; m < M; ++m)
    {
        n.zf.row(m) = alpha_zf_approx(ns.ap[m], ns.plan, ns.info_rx).transpose();
        n.pmrt.row(m) = alpha_pmrt_approx(ns.ap[m], ns.info_rx, ns.energy_rx).transpose();
    }
    return n;
}

// (E{||u||^2})^{-1/2} from a sample mean of ||u||^2, with a delta-method standard error
inline Estimate alpha_from_power(const BatchMeans &power)
{
    double p = power.mean();
    double a = 1.0 / std::sqrt(p);
    return {a, 0.5 * a / p * power.std_error()};
}

// Exact normalisation by sampling estimate draws
inline Normalization alpha_monte_carlo(const Topology &topo, const NetworkStatistics &ns, CounterRng rng, int trials)
{
    if (trials < 1)
        throw std::invalid_argument("alpha estimation needs at least one trial");
    const int M = ns.aps(), KI = ns.info_rx, KE = ns.energy_rx;
    std::vector<BatchMeans> zf(M * KI, BatchMeans(trials)), pm(M * KE, BatchMeans(trials));
    for (int t = 0; t < trials; ++t)
    {
        CounterRng tr = rng.substream(static_cast<std::uint64_t>(t));
        NetworkDraw d = draw_network(topo, ns, tr);
        for (int m = 0; m < M; ++m)
        {
            CMat Gi = d.ghat[m].leftCols(KI);
            if (KI > 0)
            {
                CMat U = zf_directions(Gi);
                for (int k = 0; k < KI; ++k)
                    zf[m * KI + k].add(U.col(k).squaredNorm());
            }
            if (KE > 0)
            {
                CMat B = null_projector(Gi);
                for (int e = 0; e < KE; ++e)
                    pm[m * KE + e].add((B * d.ghat[m].col(KI + e)).squaredNorm());
            }
        }
    }
    Normalization n;
    n.zf.resize(M, KI);
    n.zf_se.resize(M, KI);
    n.pmrt.resize(M, KE);
    n.pmrt_se.resize(M, KE);
    for (int m = 0; m < M; ++m)
    {
        for (int k = 0; k < KI; ++k)
        {
            Estimate e = alpha_from_power(zf[m * KI + k]);
            n.zf(m, k) = e.mean;
            n.zf_se(m, k) = e.std_error;
        }
        for (int k = 0; k < KE; ++k)
        {
            Estimate e = alpha_from_power(pm[m * KE + k]);
            n.pmrt(m, k) = e.mean;
            n.pmrt_se(m, k) = e.std_error;
        }
    }
    return n;
}

} // namespace simswipt
