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

#include "topology.hpp"

#include <algorithm>

namespace simswipt
{

struct PilotPlan
{
    int length = 0;                          // tau
    std::vector<int> pilot;                  // pilot index per receiver (0-based)
    std::vector<std::vector<int>> copilots;  // P_k, includes k itself

    bool shares_pilot(int k, int j) const { return pilot[k] == pilot[j]; }
};

// IRs take the first K_I - reuse_info pilots round-robin, ERs the remaining ones.
// tau = K_I + K_E - reuse_info - reuse_energy.
inline PilotPlan assign_pilots(int info_rx, int energy_rx, int reuse_info, int reuse_energy)
{
    if (reuse_info < 0 || reuse_energy < 0 || reuse_info > info_rx || reuse_energy > energy_rx)
        throw std::invalid_argument("pilot reuse factor out of range");
    const int info_pilots = info_rx - reuse_info;
    const int energy_pilots = energy_rx - reuse_energy;
    if ((info_rx > 0 && info_pilots < 1) || (energy_rx > 0 && energy_pilots < 1))
        throw std::invalid_argument("pilot reuse leaves a receiver group without pilots");
    PilotPlan plan;
    plan.length = info_pilots + energy_pilots;
    if (plan.length < 1)
        throw std::invalid_argument("pilot length must be at least one");
    for (int k = 0; k < info_rx; ++k)
        plan.pilot.push_back(k % info_pilots);
    for (int e = 0; e < energy_rx; ++e)
        plan.pilot.push_back(info_pilots + e % energy_pilots);
    const int K = info_rx + energy_rx;
    plan.copilots.assign(K, {});
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < K; ++j)
            if (plan.pilot[j] == plan.pilot[k])
                plan.copilots[k].push_back(j);
    return plan;
}

// Estimate statistics of one (AP, receiver) pair, diagonal in the eigenbasis of R = F^H F
struct LinkEstimate
{
    double norm_gain = 0.0;   // beta_bar
    double copilot_gain = 0.0; // sum of beta_bar over P_k
    CVec mean;                // g_bar
    RVec filter_spec;         // eigenvalues of the MMSE filter A
    RVec estimate_spec;       // eigenvalues of Cov(g_hat)
    RVec error_spec;          // eigenvalues of Cov(g - g_hat)
    double quality = 0.0;     // gamma = tr Cov(g_hat)
    double error_moment = 0.0; // tr Cov(g - g_hat)
};

struct ApStatistics
{
    CMat F;
    double gram_trace = 0.0; // tr(F F^H)
    RVec eig;                // eigenvalues of F^H F (clipped at 0)
    CMat basis;              // eigenvectors
    std::vector<LinkEstimate> link;
    std::vector<CMat> filter; // A per receiver

    CMat spectral(const RVec &spec) const { return basis * spec.asDiagonal() * basis.adjoint(); }
    CMat estimate_cov(int k) const { return spectral(link[k].estimate_spec); }
    CMat error_cov(int k) const { return spectral(link[k].error_spec); }

    // E{(g_hat_j - g_bar_j)(g_hat_l - g_bar_l)^H}; zero unless j and l share a pilot
    CMat estimate_cross_cov(int j, int l, const PilotPlan &plan) const
    {
        if (!plan.shares_pilot(j, l))
            return CMat::Zero(F.cols(), F.cols());
        return spectral(link[j].estimate_spec * (link[l].norm_gain / link[j].norm_gain));
    }

    // E{g_hat_j g_hat_l^H}
    CMat estimate_second_moment(int j, int l, const PilotPlan &plan) const
    {
        return link[j].mean * link[l].mean.adjoint() + estimate_cross_cov(j, l, plan);
    }
};

// Linear MMSE estimation statistics for one AP with cascade F
inline ApStatistics ap_statistics(const Topology &topo, int m, const CMat &F, const PilotPlan &plan,
                                  const SystemParams &sys)
{
    ApStatistics st;
    st.F = F;
    st.gram_trace = F.squaredNorm();
    Eigen::SelfAdjointEigenSolver<CMat> es(F.adjoint() * F);
    st.eig = es.eigenvalues().cwiseMax(0.0);
    st.basis = es.eigenvectors();
    const double tr = plan.length * sys.rho_u();
    const double noise = sys.noise_power;
    const int K = topo.receivers();
    for (int k = 0; k < K; ++k)
    {
        LinkEstimate le;
        le.norm_gain = topo.norm_gain(m, k);
        for (int j : plan.copilots[k])
            le.copilot_gain += topo.norm_gain(m, j);
        le.mean = channel_mean(topo.link(m, k), F);
        const Eigen::Index N = st.eig.size();
        le.filter_spec.resize(N);
        le.estimate_spec.resize(N);
        le.error_spec.resize(N);
        for (Eigen::Index i = 0; i < N; ++i)
        {
            const double lam = st.eig[i];
            const double den = tr * le.copilot_gain * lam + noise;
            le.filter_spec[i] = std::sqrt(tr) * le.norm_gain * lam / den;
            le.estimate_spec[i] = tr * le.norm_gain * le.norm_gain * lam * lam / den;
            le.error_spec[i] = le.norm_gain * lam * (tr * (le.copilot_gain - le.norm_gain) * lam + noise) / den;
        }
        le.quality = le.estimate_spec.sum();
        le.error_moment = le.error_spec.sum();
        st.filter.push_back(st.spectral(le.filter_spec));
        st.link.push_back(std::move(le));
    }
    return st;
}

// Statistics of the whole network under fixed phases
struct NetworkStatistics
{
    PilotPlan plan;
    SystemParams sys;
    std::vector<ApStatistics> ap;
    int info_rx = 0, energy_rx = 0;

    int aps() const { return static_cast<int>(ap.size()); }
    int receivers() const { return info_rx + energy_rx; }
    int antennas() const { return static_cast<int>(ap.front().F.cols()); }
};

inline NetworkStatistics network_statistics(const Topology &topo, const std::vector<CMat> &cascades,
                                            const PilotPlan &plan, const SystemParams &sys)
{
    if (static_cast<int>(cascades.size()) != topo.aps)
        throw std::invalid_argument("one cascade per AP expected");
    if (static_cast<int>(plan.pilot.size()) != topo.receivers())
        throw std::invalid_argument("pilot plan does not match the receiver count");
    sys.validate(plan.length);
    NetworkStatistics ns;
    ns.plan = plan;
    ns.sys = sys;
    ns.info_rx = topo.info_rx;
    ns.energy_rx = topo.energy_rx;
    for (int m = 0; m < topo.aps; ++m)
        ns.ap.push_back(ap_statistics(topo, m, cascades[m], plan, sys));
    return ns;
}

// Pilot observation at one AP projected on each pilot: y_p = sqrt(tau rho_u) sum_{k in p} g_k + n
inline std::vector<CVec> received_pilot(const CMat &channels, const PilotPlan &plan, const SystemParams &sys,
                                        CounterRng &rng)
{
    const double amp = std::sqrt(plan.length * sys.rho_u());
    std::vector<CVec> y(plan.length);
    for (int p = 0; p < plan.length; ++p)
        y[p] = std::sqrt(sys.noise_power) * complex_normal(rng, channels.rows());
    for (Eigen::Index k = 0; k < channels.cols(); ++k)
        y[plan.pilot[k]] += amp * channels.col(k);
    return y;
}

// g_hat = g_bar + A (y - E{y})
inline CVec mmse_estimate(const CVec &y, int k, const ApStatistics &st, const PilotPlan &plan, const SystemParams &sys)
{
    const double amp = std::sqrt(plan.length * sys.rho_u());
    CVec centred = y;
    for (int j : plan.copilots[k])
        centred -= amp * st.link[j].mean;
    return st.link[k].mean + st.filter[k] * centred;
}

// One draw of all true channels and their estimates; columns are receivers
struct NetworkDraw
{
    std::vector<CMat> g;
    std::vector<CMat> ghat;
};

inline NetworkDraw draw_network(const Topology &topo, const NetworkStatistics &ns, CounterRng &rng,
                                bool perfect_csi = false)
{
    const int K = topo.receivers();
    const int N = ns.antennas();
    NetworkDraw d;
    for (int m = 0; m < topo.aps; ++m)
    {
        const ApStatistics &st = ns.ap[m];
        CMat g(N, K), gh(N, K);
        for (int k = 0; k < K; ++k)
            g.col(k) = sample_channel(topo.link(m, k), st.F, rng).g;
        auto y = received_pilot(g, ns.plan, ns.sys, rng);
        for (int k = 0; k < K; ++k)
            gh.col(k) = perfect_csi ? CVec(g.col(k)) : mmse_estimate(y[ns.plan.pilot[k]], k, st, ns.plan, ns.sys);
        d.g.push_back(std::move(g));
        d.ghat.push_back(std::move(gh));
    }
    return d;
}

} // namespace simswipt
