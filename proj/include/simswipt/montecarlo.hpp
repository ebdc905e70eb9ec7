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

#include "performance.hpp"

namespace simswipt
{

// Monte Carlo estimates of every SE and HE term, with batch-means standard errors
struct OracleResult
{
    GainTables gains;
    std::vector<Estimate> ds, pc, bu, iui, eui; // per IR
    RVec sinr, se;
    std::vector<Estimate> q;             // per ER, E{E_ke} [W * symbols]
    std::vector<Estimate> harvested;     // per ER, E{E^NL(E_ke)} [W]
    RVec harvested_of_mean;              // per ER, E^NL(E{E_ke}) [W]
    RVec taylor_gap;                     // per ER, |Lambda(E{E}) - E{Lambda(E)}| [W]
    int trials = 0;
};

inline OracleResult monte_carlo(const Topology &topo, const NetworkStatistics &ns, const Normalization &alpha,
                                const ResourceDecision &dec, int trials, CounterRng rng, bool perfect_csi = false)
{
    if (trials < 2)
        throw std::invalid_argument("the oracle needs at least two trials");
    const int M = ns.aps(), KI = ns.info_rx, KE = ns.energy_rx;
    const double rho = ns.sys.rho_d();
    const double block = ns.sys.coherence_len - ns.plan.length;
    const std::size_t T = static_cast<std::size_t>(trials);

    auto grid = [&](int r, int c) { return std::vector<BatchMeans>(static_cast<std::size_t>(M * r * c), BatchMeans(T)); };
    auto izf = grid(KI, KI), ipm = grid(KI, KE), epm = grid(KE, KE), ezf = grid(KE, KI);
    std::vector<BatchMeans> eui(KI, BatchMeans(T)), iui_orth(KI, BatchMeans(T));
    std::vector<BatchMeans> qe(KE, BatchMeans(T)), nl(KE, BatchMeans(T));
    std::vector<std::vector<cplx>> coherent(static_cast<std::size_t>(KI * KI), std::vector<cplx>(T));

    for (std::size_t t = 0; t < T; ++t)
    {
        CounterRng tr = rng.substream(t);
        NetworkDraw d = draw_network(topo, ns, tr, perfect_csi);
        CMat s = CMat::Zero(KI, KI);  // s(k, j) = sum_m sqrt(a rho eta_mj) g_k^H w_mj
        CMat se = CMat::Zero(KI, KE);
        RVec energy = RVec::Constant(KE, 1.0 / rho);
        for (int m = 0; m < M; ++m)
        {
            const CMat &g = d.g[m], &gh = d.ghat[m];
            CMat Gi = gh.leftCols(KI);
            CMat Wz = zf_directions(Gi) * alpha.zf.row(m).transpose().asDiagonal();
            CMat We = null_projector(Gi) * gh.rightCols(KE) * alpha.pmrt.row(m).transpose().asDiagonal();
            CMat err = g.leftCols(KI) - Gi;
            CMat ge = g.rightCols(KE);
            CMat eZ = err.adjoint() * Wz, eE = err.adjoint() * We;
            CMat gZ = g.leftCols(KI).adjoint() * Wz, gE = g.leftCols(KI).adjoint() * We;
            CMat hE = ge.adjoint() * We, hZ = ge.adjoint() * Wz;
            const double on = dec.mode[m], off = 1.0 - dec.mode[m];
            for (int k = 0; k < KI; ++k)
            {
                for (int j = 0; j < KI; ++j)
                {
                    izf[(m * KI + k) * KI + j].add(std::norm(eZ(k, j)));
                    s(k, j) += std::sqrt(on * rho * dec.eta_info(m, j)) * gZ(k, j);
                }
                for (int e = 0; e < KE; ++e)
                {
                    ipm[(m * KI + k) * KE + e].add(std::norm(eE(k, e)));
                    se(k, e) += std::sqrt(off * rho * dec.eta_energy(m, e)) * gE(k, e);
                }
            }
            for (int e = 0; e < KE; ++e)
            {
                for (int f = 0; f < KE; ++f)
                {
                    epm[(m * KE + e) * KE + f].add(std::norm(hE(e, f)));
                    energy[e] += off * dec.eta_energy(m, f) * std::norm(hE(e, f));
                }
                for (int k = 0; k < KI; ++k)
                {
                    ezf[(m * KE + e) * KI + k].add(std::norm(hZ(e, k)));
                    energy[e] += on * dec.eta_info(m, k) * std::norm(hZ(e, k));
                }
            }
        }
        for (int k = 0; k < KI; ++k)
        {
            double orth = 0.0;
            for (int j = 0; j < KI; ++j)
            {
                coherent[k * KI + j][t] = s(k, j);
                if (!ns.plan.shares_pilot(k, j))
                    orth += std::norm(s(k, j));
            }
            iui_orth[k].add(orth);
            eui[k].add(se.row(k).squaredNorm());
        }
        for (int e = 0; e < KE; ++e)
        {
            double q = block * ns.sys.noise_power * rho * energy[e];
            qe[e].add(q);
            nl[e].add(nleh(q / block, ns.sys));
        }
    }

    OracleResult r;
    r.trials = trials;
    auto table = [&](std::vector<BatchMeans> &acc, int rows, int cols, std::vector<RMat> &mean, std::vector<RMat> &se) {
        for (int m = 0; m < M; ++m)
        {
            RMat a(rows, cols), b(rows, cols);
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j)
                {
                    const BatchMeans &bm = acc[(m * rows + i) * cols + j];
                    a(i, j) = bm.mean();
                    b(i, j) = bm.std_error();
                }
            mean.push_back(a);
            se.push_back(b);
        }
    };
    table(izf, KI, KI, r.gains.info_zf, r.gains.info_zf_se);
    table(ipm, KI, KE, r.gains.info_pmrt, r.gains.info_pmrt_se);
    table(epm, KE, KE, r.gains.energy_pmrt, r.gains.energy_pmrt_se);
    table(ezf, KE, KI, r.gains.energy_zf, r.gains.energy_zf_se);

    r.sinr.setZero(KI);
    r.se.setZero(KI);
    for (int k = 0; k < KI; ++k)
    {
        Estimate pc{}, iui = Estimate::of(iui_orth[k]), bu{};
        Estimate ds{};
        for (int j = 0; j < KI; ++j)
        {
            const auto &samples = coherent[k * KI + j];
            cplx mean = 0.0;
            BatchMeans re(T);
            for (cplx v : samples)
            {
                mean += v;
                re.add(v.real());
            }
            mean /= static_cast<double>(T);
            if (!ns.plan.shares_pilot(k, j))
                continue;
            BatchMeans spread(T);
            for (cplx v : samples)
                spread.add(std::norm(v - mean));
            Estimate var = Estimate::of(spread);
            if (j == k)
            {
                ds = Estimate::of(re);
                ds.mean = std::abs(mean);
                bu = var;
            }
            else
            {
                pc.mean += std::norm(mean);
                pc.std_error = std::hypot(pc.std_error, 2.0 * std::abs(mean) * re.std_error());
                iui.mean += var.mean;
                iui.std_error = std::hypot(iui.std_error, var.std_error);
            }
        }
        Estimate eu = Estimate::of(eui[k]);
        r.ds.push_back(ds);
        r.pc.push_back(pc);
        r.bu.push_back(bu);
        r.iui.push_back(iui);
        r.eui.push_back(eu);
        r.sinr[k] = ds.mean * ds.mean / (pc.mean + bu.mean + iui.mean + eu.mean + 1.0);
        r.se[k] = pre_log(ns) * std::log2(1.0 + r.sinr[k]);
    }
    r.harvested_of_mean.setZero(KE);
    r.taylor_gap.setZero(KE);
    for (int e = 0; e < KE; ++e)
    {
        r.q.push_back(Estimate::of(qe[e]));
        r.harvested.push_back(Estimate::of(nl[e]));
        r.harvested_of_mean[e] = nleh(r.q.back().mean / block, ns.sys);
        r.taylor_gap[e] = (1.0 - ns.sys.omega()) * std::abs(r.harvested_of_mean[e] - r.harvested.back().mean);
    }
    return r;
}

} // namespace simswipt
