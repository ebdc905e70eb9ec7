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

#include "barrier.hpp"
#include "heuristics.hpp"
#include "performance.hpp"

namespace simswipt
{

// Input power whose logistic response equals target (0 < target < phi)
inline double inverse_logistic(double target, const SystemParams &sys)
{
    if (!(target > 0.0 && target < sys.phi))
        throw std::domain_error("logistic output must lie strictly between 0 and phi");
    return sys.chi - std::log((sys.phi - target) / target) / sys.xi;
}

// Input power at which the normalised harvested power reaches energy; log1p form avoids
// cancellation for energies far below phi
inline double required_input(double energy, const SystemParams &sys)
{
    const double om = sys.omega();
    const double u = (1.0 - om) * energy;
    if (!(u > -sys.phi * om && u < sys.phi * (1.0 - om)))
        throw std::domain_error("harvested power must lie in [0, phi)");
    return -(std::log1p(-u / (sys.phi * (1.0 - om))) - std::log1p(u / (sys.phi * om))) / sys.xi;
}

// Convex majorant of inverse_logistic obtained by linearising ln(target) at anchor
inline double xi_upper_bound(double target, double anchor, const SystemParams &sys)
{
    if (!(target > 0.0 && target < sys.phi && anchor > 0.0 && anchor < sys.phi))
        throw std::domain_error("logistic output must lie strictly between 0 and phi");
    return sys.chi - (std::log((sys.phi - target) / anchor) - (target - anchor) / anchor) / sys.xi;
}

inline double quadratic_lower_bound(double x, double x0) { return x0 * (2.0 * x - x0); }

// Majorant of required_input in the harvested-power variable, tangent at anchor.
// Writes first and second derivatives with respect to energy when requested.
inline double required_input_upper(double energy, double anchor, const SystemParams &sys, double *d1 = nullptr,
                                   double *d2 = nullptr)
{
    const double om = sys.omega();
    const double top = sys.phi * (1.0 - om), base = sys.phi * om;
    const double u = (1.0 - om) * energy, u0 = (1.0 - om) * anchor;
    if (!(u < top))
        return std::numeric_limits<double>::infinity();
    const double v = -std::log1p(-u / top) / sys.xi + std::log1p(u0 / base) / sys.xi + (u - u0) / ((base + u0) * sys.xi);
    if (d1)
        *d1 = (1.0 - om) * (1.0 / (top - u) + 1.0 / (base + u0)) / sys.xi;
    if (d2)
        *d2 = (1.0 - om) * (1.0 - om) / ((top - u) * (top - u)) / sys.xi;
    return v;
}

struct JappaOptions
{
    double penalty = 10.0;
    int max_iters = 100;
    double tol = 1e-4;
    double energy_scale = 0.0; // HE targets are expressed in these units; 0 selects the starting-point harvest
    BarrierOptions barrier;
};

struct ScaTraceEntry
{
    int iteration = 0;
    double objective = 0.0;      // sum of scaled HE targets minus the binarity penalty
    double max_residual = 0.0;   // largest surrogate constraint value at the new iterate
    double max_binarity = 0.0;   // max |a - round(a)|
    double kkt = 0.0;            // scaled KKT residual of the subproblem
    double tangency = 0.0;       // max |surrogate - original| at the linearisation point
    bool accepted = true;
};

struct JappaResult
{
    ResourceDecision decision;
    PerformanceReport report;
    std::vector<ScaTraceEntry> trace;   // relaxed SCA over modes and powers
    std::vector<ScaTraceEntry> polish;  // power-only SCA after rounding
    RVec relaxed_mode;
    bool feasible = false;
    bool converged = false;
    double energy_scale = 1.0;
    std::string message;
    double max_kkt() const
    {
        double k = 0.0;
        for (const auto &e : trace)
            k = std::max(k, e.kkt);
        for (const auto &e : polish)
            k = std::max(k, e.kkt);
        return k;
    }
};

// Variables: AP modes (optional), IR amplitudes s = sqrt(eta_I), ER powers eta_E and scaled HE targets v.
// With fixed modes only the amplitudes of I-APs and the powers of E-APs are kept.
class JappaModel
{
  public:
    JappaModel(const NetworkStatistics &ns, const Normalization &alpha, const GainTables &gains, double energy_scale)
        : ns_(ns), alpha_(alpha), gains_(gains), scale_(energy_scale)
    {
        M_ = ns.aps();
        KI_ = ns.info_rx;
        KE_ = ns.energy_rx;
    }

    // free_modes: a is a variable; otherwise fixed to the binary mode vector
    void layout(bool free_modes, const RVec &fixed_mode)
    {
        free_modes_ = free_modes;
        fixed_mode_ = fixed_mode;
        idx_a_.assign(M_, -1);
        idx_s_.assign(M_ * KI_, -1);
        idx_e_.assign(M_ * KE_, -1);
        idx_v_.assign(KE_, -1);
        int n = 0;
        if (free_modes)
            for (int m = 0; m < M_; ++m)
                idx_a_[m] = n++;
        for (int m = 0; m < M_; ++m)
            for (int k = 0; k < KI_; ++k)
                if (free_modes || fixed_mode[m] == 1.0)
                    idx_s_[m * KI_ + k] = n++;
        for (int m = 0; m < M_; ++m)
            for (int e = 0; e < KE_; ++e)
                if (free_modes || fixed_mode[m] == 0.0)
                    idx_e_[m * KE_ + e] = n++;
        for (int e = 0; e < KE_; ++e)
            idx_v_[e] = n++;
        dim_ = n;
    }

    int dim() const { return dim_; }

    double mode(const RVec &x, int m) const { return idx_a_[m] >= 0 ? x[idx_a_[m]] : fixed_mode_[m]; }
    double amp(const RVec &x, int m, int k) const { int i = idx_s_[m * KI_ + k]; return i >= 0 ? x[i] : 0.0; }
    double epow(const RVec &x, int m, int e) const { int i = idx_e_[m * KE_ + e]; return i >= 0 ? x[i] : 0.0; }
    double target(const RVec &x, int e) const { return x[idx_v_[e]]; }

    RVec pack(const RVec &modes, const RMat &amps, const RMat &epows, const RVec &v) const
    {
        RVec x(dim_);
        for (int m = 0; m < M_; ++m)
        {
            if (idx_a_[m] >= 0)
                x[idx_a_[m]] = modes[m];
            for (int k = 0; k < KI_; ++k)
                if (idx_s_[m * KI_ + k] >= 0)
                    x[idx_s_[m * KI_ + k]] = amps(m, k);
            for (int e = 0; e < KE_; ++e)
                if (idx_e_[m * KE_ + e] >= 0)
                    x[idx_e_[m * KE_ + e]] = epows(m, e);
        }
        for (int e = 0; e < KE_; ++e)
            x[idx_v_[e]] = v[e];
        return x;
    }

    ResourceDecision decision(const RVec &x) const
    {
        ResourceDecision d;
        d.mode.resize(M_);
        d.eta_info.resize(M_, KI_);
        d.eta_energy.resize(M_, KE_);
        for (int m = 0; m < M_; ++m)
        {
            d.mode[m] = mode(x, m);
            for (int k = 0; k < KI_; ++k)
                d.eta_info(m, k) = amp(x, m, k) * amp(x, m, k);
            for (int e = 0; e < KE_; ++e)
                d.eta_energy(m, e) = epow(x, m, e);
        }
        return d;
    }

    // Received input power at ER e [W]; amplitudes enter squared, or linearised around x0 when given
    double input_power(const RVec &x, int e, const RVec *x0 = nullptr, RVec *grad = nullptr) const
    {
        const double pd = ns_.sys.dl_power;
        double q = ns_.sys.noise_power;
        if (grad)
            *grad = RVec::Zero(dim_);
        for (int m = 0; m < M_; ++m)
        {
            for (int f = 0; f < KE_; ++f)
            {
                const double c = pd * gains_.energy_pmrt[m](e, f);
                q += c * epow(x, m, f);
                if (grad && idx_e_[m * KE_ + f] >= 0)
                    (*grad)[idx_e_[m * KE_ + f]] += c;
            }
            for (int k = 0; k < KI_; ++k)
            {
                const double c = pd * gains_.energy_zf[m](e, k);
                const double s = amp(x, m, k);
                const double s0 = x0 ? amp(*x0, m, k) : s;
                q += c * (x0 ? quadratic_lower_bound(s, s0) : s * s);
                if (grad && idx_s_[m * KI_ + k] >= 0)
                    (*grad)[idx_s_[m * KI_ + k]] += 2.0 * c * s0;
            }
        }
        return q;
    }

    double coherent_gain(const RVec &x, int k) const
    {
        double q = 0.0;
        for (int m = 0; m < M_; ++m)
            q += alpha_.zf(m, k) * amp(x, m, k);
        return q;
    }

    // rho * (PC + interference) + 1 for IR k, convex in the amplitudes and linear in eta_E
    double se_denominator(const RVec &x, int k, RVec *grad = nullptr, RMat *hess = nullptr) const
    {
        const double rho = ns_.sys.rho_d();
        double v = 1.0;
        if (grad)
            *grad = RVec::Zero(dim_);
        if (hess)
            *hess = RMat::Zero(dim_, dim_);
        for (int j : ns_.plan.copilots[k])
        {
            if (j == k || j >= KI_)
                continue;
            double q = coherent_gain(x, j);
            v += rho * q * q;
            for (int m = 0; m < M_; ++m)
            {
                int i = idx_s_[m * KI_ + j];
                if (i < 0)
                    continue;
                if (grad)
                    (*grad)[i] += 2.0 * rho * q * alpha_.zf(m, j);
                if (hess)
                    for (int m2 = 0; m2 < M_; ++m2)
                        if (idx_s_[m2 * KI_ + j] >= 0)
                            (*hess)(i, idx_s_[m2 * KI_ + j]) += 2.0 * rho * alpha_.zf(m, j) * alpha_.zf(m2, j);
            }
        }
        for (int m = 0; m < M_; ++m)
        {
            for (int j = 0; j < KI_; ++j)
            {
                const double c = rho * gains_.info_zf[m](k, j);
                const double s = amp(x, m, j);
                v += c * s * s;
                int i = idx_s_[m * KI_ + j];
                if (i >= 0 && grad)
                    (*grad)[i] += 2.0 * c * s;
                if (i >= 0 && hess)
                    (*hess)(i, i) += 2.0 * c;
            }
            for (int e = 0; e < KE_; ++e)
            {
                const double c = rho * gains_.info_pmrt[m](k, e);
                v += c * epow(x, m, e);
                int i = idx_e_[m * KE_ + e];
                if (i >= 0 && grad)
                    (*grad)[i] += c;
            }
        }
        return v;
    }

    double se_threshold(int k) const
    {
        (void)k;
        return std::exp2(ns_.sys.se_target / pre_log(ns_)) - 1.0;
    }

    bool se_active() const { return ns_.sys.se_target > 0.0 && KI_ > 0; }

    double energy_scale() const { return scale_; }
    double max_target() const { return 0.999 * ns_.sys.phi / scale_; }

    // Subproblem linearised at x0 (objective is minimised). Each nonconvex constraint also gets an
    // "original" counterpart with the same scaling for tangency checks.
    struct Built
    {
        ConvexProgram program;
        std::vector<SmoothFn> original; // same order as the leading surrogate constraints
        int surrogate_count = 0;
    };

    Built build(const RVec &x0, double penalty) const
    {
        Built b;
        ConvexProgram &p = b.program;
        p.dim = dim_;
        const int n = dim_;
        const SystemParams sys = ns_.sys;
        const double sc = scale_;

        // objective: -sum v + penalty * sum (a - a0 (2a - a0))
        {
            RVec c = RVec::Zero(n);
            double c0 = 0.0;
            for (int e = 0; e < KE_; ++e)
                c[idx_v_[e]] -= 1.0;
            if (free_modes_)
                for (int m = 0; m < M_; ++m)
                {
                    double a0 = x0[idx_a_[m]];
                    c[idx_a_[m]] += penalty * (1.0 - 2.0 * a0);
                    c0 += penalty * a0 * a0;
                }
            p.objective = [c, c0, n](const RVec &x, RVec *g, RMat *H) {
                if (g)
                    *g = c;
                if (H)
                    *H = RMat::Zero(n, n);
                return c.dot(x) + c0;
            };
        }

        // HE: required_input_upper(v) - linearised input power <= 0, scaled by the input power at x0
        for (int e = 0; e < KE_; ++e)
        {
            const double q0 = input_power(x0, e);
            const double anchor = sc * x0[idx_v_[e]];
            const int iv = idx_v_[e];
            p.constraints.push_back([this, e, x0, q0, anchor, iv, sc, sys, n](const RVec &x, RVec *g, RMat *H) {
                double d1 = 0.0, d2 = 0.0;
                double req = required_input_upper(sc * x[iv], anchor, sys, g ? &d1 : nullptr, H ? &d2 : nullptr);
                if (!std::isfinite(req))
                    return req;
                RVec gq;
                double q = input_power(x, e, &x0, g ? &gq : nullptr);
                if (g)
                {
                    *g = -gq / q0;
                    (*g)[iv] += sc * d1 / q0;
                }
                if (H)
                {
                    *H = RMat::Zero(n, n);
                    (*H)(iv, iv) = sc * sc * d2 / q0;
                }
                return (req - q) / q0;
            });
            b.original.push_back([this, e, q0, iv, sc, sys](const RVec &x, RVec *, RMat *) {
                return (required_input(sc * x[iv], sys) - input_power(x, e)) / q0;
            });
        }

        // SE: T * denominator - rho q0 (2q - q0) <= 0, scaled by rho q0^2
        if (se_active())
            for (int k = 0; k < KI_; ++k)
            {
                const double T = se_threshold(k);
                const double rho = ns_.sys.rho_d();
                const double qk0 = coherent_gain(x0, k);
                const double scale = std::max(rho * qk0 * qk0, 1.0);
                p.constraints.push_back([this, k, T, rho, qk0, scale](const RVec &x, RVec *g, RMat *H) {
                    RVec gd;
                    RMat Hd;
                    double den = se_denominator(x, k, g ? &gd : nullptr, H ? &Hd : nullptr);
                    double q = coherent_gain(x, k);
                    if (g)
                    {
                        *g = T * gd;
                        for (int m = 0; m < M_; ++m)
                            if (idx_s_[m * KI_ + k] >= 0)
                                (*g)[idx_s_[m * KI_ + k]] -= 2.0 * rho * qk0 * alpha_.zf(m, k);
                        *g /= scale;
                    }
                    if (H)
                        *H = T * Hd / scale;
                    return (T * den - rho * qk0 * (2.0 * q - qk0)) / scale;
                });
                b.original.push_back([this, k, T, rho, scale](const RVec &x, RVec *, RMat *) {
                    double q = coherent_gain(x, k);
                    return (T * se_denominator(x, k) - rho * q * q) / scale;
                });
            }

        // IR power: sum s^2 <= a0 (2a - a0) (free modes) or <= 1
        for (int m = 0; m < M_; ++m)
        {
            if (KI_ == 0 || idx_s_[m * KI_] < 0)
                continue;
            const double a0 = free_modes_ ? x0[idx_a_[m]] : 1.0;
            p.constraints.push_back([this, m, a0, n](const RVec &x, RVec *g, RMat *H) {
                double v = 0.0;
                if (g)
                    *g = RVec::Zero(n);
                if (H)
                    *H = RMat::Zero(n, n);
                for (int k = 0; k < KI_; ++k)
                {
                    int i = idx_s_[m * KI_ + k];
                    v += x[i] * x[i];
                    if (g)
                        (*g)[i] = 2.0 * x[i];
                    if (H)
                        (*H)(i, i) = 2.0;
                }
                if (free_modes_)
                {
                    v -= quadratic_lower_bound(x[idx_a_[m]], a0);
                    if (g)
                        (*g)[idx_a_[m]] = -2.0 * a0;
                }
                else
                    v -= 1.0;
                return v;
            });
            b.original.push_back([this, m](const RVec &x, RVec *, RMat *) {
                double v = 0.0;
                for (int k = 0; k < KI_; ++k)
                    v += amp(x, m, k) * amp(x, m, k);
                double a = mode(x, m);
                return v - (free_modes_ ? a * a : 1.0);
            });
        }
        b.surrogate_count = static_cast<int>(p.constraints.size());

        // ER power: sum eta_E + a^2 <= 1 (free modes) or sum eta_E <= 1
        for (int m = 0; m < M_; ++m)
        {
            if (KE_ == 0 || idx_e_[m * KE_] < 0)
                continue;
            p.constraints.push_back([this, m, n](const RVec &x, RVec *g, RMat *H) {
                double v = -1.0;
                if (g)
                    *g = RVec::Zero(n);
                if (H)
                    *H = RMat::Zero(n, n);
                for (int e = 0; e < KE_; ++e)
                {
                    int i = idx_e_[m * KE_ + e];
                    v += x[i];
                    if (g)
                        (*g)[i] = 1.0;
                }
                if (free_modes_)
                {
                    int ia = idx_a_[m];
                    v += x[ia] * x[ia];
                    if (g)
                        (*g)[ia] = 2.0 * x[ia];
                    if (H)
                        (*H)(ia, ia) = 2.0;
                }
                return v;
            });
        }

        // boxes
        auto linear = [n](int i, double sign, double offset) {
            return SmoothFn([n, i, sign, offset](const RVec &x, RVec *g, RMat *H) {
                if (g)
                {
                    *g = RVec::Zero(n);
                    (*g)[i] = sign;
                }
                if (H)
                    *H = RMat::Zero(n, n);
                return sign * x[i] + offset;
            });
        };
        for (int m = 0; m < M_; ++m)
        {
            if (idx_a_[m] >= 0)
            {
                p.constraints.push_back(linear(idx_a_[m], -1.0, 0.0));
                p.constraints.push_back(linear(idx_a_[m], 1.0, -1.0));
            }
            for (int k = 0; k < KI_; ++k)
                if (idx_s_[m * KI_ + k] >= 0)
                    p.constraints.push_back(linear(idx_s_[m * KI_ + k], -1.0, 0.0));
            for (int e = 0; e < KE_; ++e)
                if (idx_e_[m * KE_ + e] >= 0)
                    p.constraints.push_back(linear(idx_e_[m * KE_ + e], -1.0, 0.0));
        }
        const double vmin = ns_.sys.energy_target / sc;
        for (int e = 0; e < KE_; ++e)
        {
            p.constraints.push_back(linear(idx_v_[e], -1.0, vmin));
            p.constraints.push_back(linear(idx_v_[e], 1.0, -max_target()));
        }
        return b;
    }

    double penalized_objective(const RVec &x, double penalty) const
    {
        double v = 0.0;
        for (int e = 0; e < KE_; ++e)
            v += x[idx_v_[e]];
        if (free_modes_)
            for (int m = 0; m < M_; ++m)
            {
                double a = x[idx_a_[m]];
                v -= penalty * (a - a * a);
            }
        return v;
    }

    double max_binarity(const RVec &x) const
    {
        double b = 0.0;
        for (int m = 0; m < M_; ++m)
        {
            double a = mode(x, m);
            b = std::max(b, std::abs(a - std::round(a)));
        }
        return b;
    }

  private:
    const NetworkStatistics &ns_;
    const Normalization &alpha_;
    const GainTables &gains_;
    double scale_ = 1.0;
    int M_ = 0, KI_ = 0, KE_ = 0, dim_ = 0;
    bool free_modes_ = true;
    RVec fixed_mode_;
    std::vector<int> idx_a_, idx_s_, idx_e_, idx_v_;
};

namespace detail
{

inline double max_constraint(const ConvexProgram &p, const RVec &x)
{
    double r = -std::numeric_limits<double>::infinity();
    for (const SmoothFn &c : p.constraints)
        r = std::max(r, c(x, nullptr, nullptr));
    return r;
}

// Runs SCA from x (strictly feasible for the surrogate at x); returns the final iterate
inline RVec run_sca(const JappaModel &model, RVec x, const JappaOptions &opt, double penalty,
                    std::vector<ScaTraceEntry> &trace, bool &converged)
{
    converged = false;
    double obj = model.penalized_objective(x, penalty);
    for (int n = 1; n <= opt.max_iters; ++n)
    {
        JappaModel::Built b = model.build(x, penalty);
        ScaTraceEntry te;
        te.iteration = n;
        for (std::size_t i = 0; i < b.original.size(); ++i)
            te.tangency = std::max(te.tangency, std::abs(b.program.constraints[i](x, nullptr, nullptr) - b.original[i](x, nullptr, nullptr)));
        BarrierResult r = barrier_solve(b.program, x, opt.barrier);
        te.kkt = r.kkt.residual();
        double cand = model.penalized_objective(r.x, penalty);
        te.max_residual = max_constraint(b.program, r.x);
        te.accepted = r.x.allFinite() && cand >= obj;
        if (te.accepted)
        {
            double change = cand - obj;
            x = r.x;
            obj = cand;
            te.objective = obj;
            te.max_binarity = model.max_binarity(x);
            trace.push_back(te);
            if (change <= opt.tol * std::max(1.0, std::abs(obj)))
            {
                converged = true;
                break;
            }
        }
        else
        {
            te.objective = obj;
            te.max_binarity = model.max_binarity(x);
            trace.push_back(te);
            converged = true;
            break;
        }
    }
    return x;
}

} // namespace detail

// Joint AP mode selection and power allocation under fixed phases
inline JappaResult jappa(const NetworkStatistics &ns, const Normalization &alpha, const GainTables &gains,
                         const JappaOptions &opt = {})
{
    const int M = ns.aps(), KI = ns.info_rx, KE = ns.energy_rx;
    JappaResult res;
    if (KE == 0)
        throw std::invalid_argument("joint allocation needs at least one ER");

    // starting point: a = 1/2, half of the per-group budget split equally
    RVec a0 = RVec::Constant(M, 0.5);
    RMat s0 = RMat::Constant(M, std::max(KI, 1), KI ? std::sqrt(0.5 * 0.25 / KI) : 0.0);
    RMat e0 = RMat::Constant(M, KE, 0.5 * 0.75 / KE);

    // energy scale from the harvested power at the starting point
    ResourceDecision d0;
    d0.mode = RVec::Ones(M);
    d0.eta_info = s0.leftCols(KI).cwiseProduct(s0.leftCols(KI));
    d0.eta_energy = e0;
    {
        double q = 0.0;
        for (int e = 0; e < KE; ++e)
        {
            double in = ns.sys.noise_power;
            for (int m = 0; m < M; ++m)
            {
                for (int f = 0; f < KE; ++f)
                    in += ns.sys.dl_power * e0(m, f) * gains.energy_pmrt[m](e, f);
                for (int k = 0; k < KI; ++k)
                    in += ns.sys.dl_power * d0.eta_info(m, k) * gains.energy_zf[m](e, k);
            }
            q += nleh(in, ns.sys);
        }
        res.energy_scale = opt.energy_scale > 0.0 ? opt.energy_scale : std::max(q / KE, std::max(ns.sys.energy_target, 1e-300));
    }
    JappaModel model(ns, alpha, gains, res.energy_scale);
    model.layout(true, RVec());
    RVec v0(KE);
    {
        RVec probe = model.pack(a0, s0, e0, RVec::Zero(KE));
        for (int e = 0; e < KE; ++e)
        {
            double in = model.input_power(probe, e);
            // largest target reachable with this input, halved for a strict margin
            double lo = 0.0, hi = ns.sys.phi;
            for (int it = 0; it < 200; ++it)
            {
                double mid = 0.5 * (lo + hi);
                (required_input(mid, ns.sys) <= in ? lo : hi) = mid;
            }
            v0[e] = 0.5 * lo / res.energy_scale;
        }
    }
    RVec x = model.pack(a0, s0, e0, v0);
    {
        JappaModel::Built b = model.build(x, opt.penalty);
        if (detail::max_constraint(b.program, x) >= 0.0)
        {
            RVec y = find_strictly_feasible(b.program, x);
            if (y.size() == 0)
            {
                res.message = "no strictly feasible starting point (QoS targets unreachable)";
                return res;
            }
            x = y;
        }
    }
    bool conv = false;
    x = detail::run_sca(model, x, opt, opt.penalty, res.trace, conv);
    res.converged = conv;
    res.relaxed_mode.resize(M);
    for (int m = 0; m < M; ++m)
        res.relaxed_mode[m] = model.mode(x, m);

    // rounding and power-only polish with fixed modes
    RVec mode(M);
    for (int m = 0; m < M; ++m)
        mode[m] = res.relaxed_mode[m] >= 0.5 ? 1.0 : 0.0;
    JappaModel fixed(ns, alpha, gains, res.energy_scale);
    fixed.layout(false, mode);
    RMat s(M, std::max(KI, 1)), ep(M, KE);
    s.setZero();
    ep.setZero();
    RVec v(KE);
    for (int m = 0; m < M; ++m)
    {
        for (int k = 0; k < KI; ++k)
            s(m, k) = model.amp(x, m, k);
        for (int e = 0; e < KE; ++e)
            ep(m, e) = model.epow(x, m, e);
        if (mode[m] == 1.0 && KI > 0)
        {
            double tot = s.row(m).head(KI).squaredNorm();
            if (tot > 0.999)
                s.row(m) *= std::sqrt(0.999 / tot);
        }
        if (mode[m] == 0.0)
        {
            double tot = ep.row(m).sum();
            if (tot > 0.999)
                ep.row(m) *= 0.999 / tot;
        }
    }
    for (int e = 0; e < KE; ++e)
        v[e] = model.target(x, e);
    RVec y = fixed.pack(mode, s, ep, v);
    {
        JappaModel::Built b = fixed.build(y, 0.0);
        if (detail::max_constraint(b.program, y) >= 0.0)
        {
            RVec z = find_strictly_feasible(b.program, y);
            if (z.size() == 0)
            {
                res.message = "rounded modes admit no feasible power allocation";
                res.decision = fixed.decision(y);
                return res;
            }
            y = z;
        }
    }
    y = detail::run_sca(fixed, y, opt, 0.0, res.polish, conv);
    res.decision = fixed.decision(y);
    res.report = evaluate(ns, alpha, gains, res.decision);
    res.feasible = true;
    return res;
}

} // namespace simswipt
