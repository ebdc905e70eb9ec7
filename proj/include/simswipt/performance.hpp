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

#include "precoding.hpp"

namespace simswipt
{

// Logistic rectifier response Lambda(x) = phi / (1 + exp(-xi (x - chi)))
inline double logistic(double x, const SystemParams &sys)
{
    return sys.phi / (1.0 + std::exp(-sys.xi * (x - sys.chi)));
}

// (Lambda(x) - phi Omega) / (1 - Omega), evaluated without cancellation for small x
inline double nleh(double input_w, const SystemParams &sys)
{
    const double lift = -std::expm1(-sys.xi * input_w); // 1 - exp(-xi x)
    return sys.phi * lift / (1.0 + std::exp(-sys.xi * (input_w - sys.chi)));
}

// Orthogonal projector onto the complement of the numerically non-zero span of the columns
inline CMat span_complement(const CMat &cols, double rel_tol = 1e-10)
{
    const Eigen::Index N = cols.rows();
    CMat B = CMat::Identity(N, N);
    if (cols.cols() == 0 || cols.norm() == 0.0)
        return B;
    Eigen::JacobiSVD<CMat> svd(cols, Eigen::ComputeThinU);
    const RVec &sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > rel_tol * sv[0])
            B -= svd.matrixU().col(i) * svd.matrixU().col(i).adjoint();
    return B;
}

// Second moments of every effective gain |h^H w| that enters the SE and HE expressions.
// info_zf[m](k, j)     = E|g~_k^H w^ZF_mj|^2    (estimation error of IR k through IR j's precoder)
// info_pmrt[m](k, e)   = E|g~_k^H w^PMRT_me|^2
// energy_pmrt[m](e, f) = E|g_e^H w^PMRT_mf|^2  (diagonal: serving term, co-pilot and orthogonal cross terms off it)
// energy_zf[m](e, k)   = E|g_e^H w^ZF_mk|^2
struct GainTables
{
    std::vector<RMat> info_zf, info_pmrt, energy_pmrt, energy_zf;
    std::vector<RMat> info_zf_se, info_pmrt_se, energy_pmrt_se, energy_zf_se; // zero for closed forms
};

namespace detail
{

// E|mu1^H B x2 + d^H B x2|^2 style moment: x1 = mu1 + d + g~, x2 = mu2 + c d, d ~ CN(0,S), g~ ~ CN(0,Cerr)
inline double cross_moment(const CVec &mu1, const CVec &mu2, double c, const CMat &S, const CMat &B, const CMat &Cerr)
{
    CMat BS = B * S;
    cplx mean = mu1.dot(B * mu2) + c * BS.trace();
    CMat BSB = BS * B;
    double var = c * c * mu1.dot(BSB * mu1).real() + mu2.dot(BSB * mu2).real() + c * c * (BS * BS).trace().real();
    CMat BCB = B * Cerr * B;
    double err = mu2.dot(BCB * mu2).real() + c * c * (BCB * S).trace().real();
    return std::norm(mean) + var + err;
}

} // namespace detail

// Deterministic approximation of E{u u^H} for the ZF direction of IR k: u ~ G W^{-1} e_k with W = E{G^H G}
inline CMat zf_direction_moment(const ApStatistics &st, const PilotPlan &plan, int info_rx, int k)
{
    CMat W = info_gram_moment(st, plan, info_rx);
    CVec v = W.ldlt().solve(CVec::Unit(info_rx, k));
    const Eigen::Index N = st.F.cols();
    CVec mean = CVec::Zero(N);
    for (int j = 0; j < info_rx; ++j)
        mean += v[j] * st.link[j].mean;
    CMat psi = mean * mean.adjoint();
    for (int j = 0; j < info_rx; ++j)
        for (int l = 0; l < info_rx; ++l)
            if (plan.shares_pilot(j, l))
                psi += (v[j] * std::conj(v[l])) * st.estimate_cross_cov(j, l, plan);
    return psi;
}

// Gains per unit precoder power; the normalisation factor only enters through the desired signal
inline GainTables closed_form_gains(const NetworkStatistics &ns)
{
    const int M = ns.aps(), KI = ns.info_rx, KE = ns.energy_rx;
    GainTables t;
    for (int m = 0; m < M; ++m)
    {
        const ApStatistics &st = ns.ap[m];
        const Eigen::Index N = st.F.cols();
        std::vector<CMat> psi(KI), err(KI + KE), est(KI + KE), second(KI + KE);
        for (int k = 0; k < KI; ++k)
            psi[k] = zf_direction_moment(st, ns.plan, KI, k);
        CMat info_means(N, KI);
        for (int k = 0; k < KI + KE; ++k)
        {
            err[k] = st.error_cov(k);
            est[k] = st.estimate_cov(k);
            second[k] = st.link[k].mean * st.link[k].mean.adjoint() + est[k];
            if (k < KI)
                info_means.col(k) = st.link[k].mean;
        }
        const CMat B0 = span_complement(info_means);
        const CMat gram = st.F.adjoint() * st.F;
        RVec pmrt_power(KE);
        for (int e = 0; e < KE; ++e)
            pmrt_power[e] = (B0 * second[KI + e] * B0).trace().real();

        RMat izf(KI, KI), ipm(KI, KE), epm(KE, KE), ezf(KE, KI);
        for (int k = 0; k < KI; ++k)
        {
            for (int j = 0; j < KI; ++j)
                izf(k, j) = (err[k] * psi[j]).trace().real() / psi[j].trace().real();
            for (int e = 0; e < KE; ++e)
                ipm(k, e) = (err[k] * B0 * second[KI + e] * B0).trace().real() / pmrt_power[e];
        }
        for (int e = 0; e < KE; ++e)
        {
            const int ke = KI + e;
            const LinkEstimate &le = st.link[ke];
            CMat full = le.mean * le.mean.adjoint() + le.norm_gain * gram; // E{g_e g_e^H}
            for (int f = 0; f < KE; ++f)
            {
                const int kf = KI + f;
                const double a2 = 1.0 / pmrt_power[f];
                if (f == e)
                    epm(e, f) = a2 * detail::cross_moment(le.mean, le.mean, 1.0, est[ke], B0, err[ke]);
                else if (ns.plan.shares_pilot(ke, kf))
                    epm(e, f) = a2 * detail::cross_moment(le.mean, st.link[kf].mean, st.link[kf].norm_gain / le.norm_gain,
                                                          est[ke], B0, err[ke]);
                else
                    epm(e, f) = a2 * (full * B0 * second[kf] * B0).trace().real();
            }
            for (int k = 0; k < KI; ++k)
                ezf(e, k) = (full * psi[k]).trace().real() / psi[k].trace().real();
        }
        t.info_zf.push_back(izf);
        t.info_pmrt.push_back(ipm);
        t.energy_pmrt.push_back(epm);
        t.energy_zf.push_back(ezf);
        t.info_zf_se.push_back(RMat::Zero(KI, KI));
        t.info_pmrt_se.push_back(RMat::Zero(KI, KE));
        t.energy_pmrt_se.push_back(RMat::Zero(KE, KE));
        t.energy_zf_se.push_back(RMat::Zero(KE, KI));
    }
    return t;
}

// Decomposition of each IR's effective SINR
struct InfoTerms
{
    RVec ds, pc, bu, iui, eui, sinr, se;
};

struct EnergyTerms
{
    RVec q;         // received RF energy per block [W * symbols]
    RVec input_w;   // q / (tau_c - tau) [W]
    RVec harvested; // average non-linear harvested power [W]
    double sum_harvested = 0.0;
};

struct PerformanceReport
{
    InfoTerms info;
    EnergyTerms energy;
    std::vector<bool> se_ok, energy_ok;
    double min_se = 0.0;
    bool qos_ok = true;
};

inline double pre_log(const NetworkStatistics &ns)
{
    return 1.0 - static_cast<double>(ns.plan.length) / ns.sys.coherence_len;
}

// Closed-form SINR and SE for given gains and resource decision
inline InfoTerms info_terms(const NetworkStatistics &ns, const Normalization &alpha, const GainTables &t,
                            const ResourceDecision &d)
{
    const int M = ns.aps(), KI = ns.info_rx, KE = ns.energy_rx;
    const double rho = ns.sys.rho_d();
    InfoTerms r;
    for (RVec *v : {&r.ds, &r.pc, &r.bu, &r.iui, &r.eui, &r.sinr, &r.se})
        v->setZero(KI);
    RVec coherent = RVec::Zero(KI);
    for (int k = 0; k < KI; ++k)
        for (int m = 0; m < M; ++m)
            coherent[k] += alpha.zf(m, k) * std::sqrt(d.mode[m] * rho * d.eta_info(m, k));
    for (int k = 0; k < KI; ++k)
    {
        r.ds[k] = coherent[k];
        for (int j : ns.plan.copilots[k])
            if (j != k && j < KI)
                r.pc[k] += coherent[j] * coherent[j];
        for (int m = 0; m < M; ++m)
        {
            const double on = d.mode[m] * rho, off = (1.0 - d.mode[m]) * rho;
            for (int j = 0; j < KI; ++j)
                (j == k ? r.bu[k] : r.iui[k]) += on * d.eta_info(m, j) * t.info_zf[m](k, j);
            for (int e = 0; e < KE; ++e)
                r.eui[k] += off * d.eta_energy(m, e) * t.info_pmrt[m](k, e);
        }
        r.sinr[k] = r.ds[k] * r.ds[k] / (r.pc[k] + r.bu[k] + r.iui[k] + r.eui[k] + 1.0);
        r.se[k] = pre_log(ns) * std::log2(1.0 + r.sinr[k]);
    }
    return r;
}

// Average received energy Q and harvested power per ER
inline EnergyTerms energy_terms(const NetworkStatistics &ns, const GainTables &t, const ResourceDecision &d)
{
    const int M = ns.aps(), KI = ns.info_rx, KE = ns.energy_rx;
    const double rho = ns.sys.rho_d();
    const double block = ns.sys.coherence_len - ns.plan.length;
    EnergyTerms r;
    r.q.setZero(KE);
    r.input_w.setZero(KE);
    r.harvested.setZero(KE);
    for (int e = 0; e < KE; ++e)
    {
        double acc = 1.0 / rho;
        for (int m = 0; m < M; ++m)
        {
            for (int f = 0; f < KE; ++f)
                acc += (1.0 - d.mode[m]) * d.eta_energy(m, f) * t.energy_pmrt[m](e, f);
            for (int k = 0; k < KI; ++k)
                acc += d.mode[m] * d.eta_info(m, k) * t.energy_zf[m](e, k);
        }
        r.q[e] = block * ns.sys.noise_power * rho * acc;
        r.input_w[e] = r.q[e] / block;
        r.harvested[e] = nleh(r.input_w[e], ns.sys);
        r.sum_harvested += r.harvested[e];
    }
    return r;
}

inline PerformanceReport evaluate(const NetworkStatistics &ns, const Normalization &alpha, const GainTables &t,
                                  const ResourceDecision &d)
{
    PerformanceReport rep;
    rep.info = info_terms(ns, alpha, t, d);
    rep.energy = energy_terms(ns, t, d);
    rep.min_se = ns.info_rx ? rep.info.se.minCoeff() : 0.0;
    for (int k = 0; k < ns.info_rx; ++k)
    {
        rep.se_ok.push_back(rep.info.se[k] >= ns.sys.se_target);
        rep.qos_ok = rep.qos_ok && rep.se_ok.back();
    }
    for (int e = 0; e < ns.energy_rx; ++e)
    {
        rep.energy_ok.push_back(rep.energy.harvested[e] >= ns.sys.energy_target);
        rep.qos_ok = rep.qos_ok && rep.energy_ok.back();
    }
    return rep;
}

} // namespace simswipt
