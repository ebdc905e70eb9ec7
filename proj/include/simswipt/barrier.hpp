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

#include "types.hpp"

#include <functional>
#include <limits>

namespace simswipt
{

// Smooth convex function: returns the value and, when requested, gradient and Hessian.
// Points outside the domain return +inf.
using SmoothFn = std::function<double(const RVec &x, RVec *grad, RMat *hess)>;

// minimize objective(x) subject to constraints[i](x) <= 0
struct ConvexProgram
{
    int dim = 0;
    SmoothFn objective;
    std::vector<SmoothFn> constraints;
};

struct BarrierOptions
{
    double mu = 10.0;          // barrier decrease factor
    double t0 = 1.0;
    double gap_tol = 1e-9;     // stop when m / t <= gap_tol * (1 + |f0|)
    double newton_tol = 1e-14; // half squared Newton decrement
    int max_newton = 200;      // per centering step
    int max_outer = 60;
};

struct KktReport
{
    double stationarity = 0.0;    // ||grad f0 + sum lambda_i grad f_i||_inf / (1 + ||grad f0||_inf)
    double complementarity = 0.0; // sum lambda_i |f_i| / (1 + |f0|)
    double primal = 0.0;          // max(0, max f_i)
    double residual() const { return std::max({stationarity, complementarity, primal}); }
};

struct BarrierResult
{
    RVec x;
    RVec duals;
    double objective = 0.0;
    KktReport kkt;
    int newton_steps = 0;
    bool converged = false;
    std::string message;
};

namespace detail
{

struct BarrierEval
{
    double value = 0.0;
    RVec grad;
    RMat hess;
    bool finite = false;
};

inline BarrierEval barrier_eval(const ConvexProgram &p, const RVec &x, double t, bool derivatives)
{
    BarrierEval e;
    RVec g;
    RMat H;
    double f0 = p.objective(x, derivatives ? &g : nullptr, derivatives ? &H : nullptr);
    if (!std::isfinite(f0))
        return e;
    e.value = t * f0;
    if (derivatives)
    {
        e.grad = t * g;
        e.hess = t * H;
    }
    for (const SmoothFn &c : p.constraints)
    {
        RVec gi;
        RMat Hi;
        double fi = c(x, derivatives ? &gi : nullptr, derivatives ? &Hi : nullptr);
        if (!(fi < 0.0) || !std::isfinite(fi))
            return e;
        e.value -= std::log(-fi);
        if (derivatives)
        {
            e.grad += gi / (-fi);
            e.hess += Hi / (-fi);
            e.hess.noalias() += (gi * gi.transpose()) / (fi * fi);
        }
    }
    e.finite = true;
    return e;
}

inline RVec newton_direction(const RMat &H, const RVec &g)
{
    const Eigen::Index n = H.rows();
    double shift = 0.0;
    const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 12; ++attempt)
    {
        Eigen::LLT<RMat> llt(H + shift * RMat::Identity(n, n));
        if (llt.info() == Eigen::Success)
        {
            RVec d = -llt.solve(g);
            if (d.allFinite())
                return d;
        }
        shift = shift == 0.0 ? 1e-14 * scale : shift * 100.0;
    }
    return -g / scale;
}

} // namespace detail

inline KktReport kkt_report(const ConvexProgram &p, const RVec &x, const RVec &duals)
{
    KktReport r;
    RVec g0;
    RMat H0;
    double f0 = p.objective(x, &g0, &H0);
    RVec stat = g0;
    double comp = 0.0;
    for (std::size_t i = 0; i < p.constraints.size(); ++i)
    {
        RVec gi;
        RMat Hi;
        double fi = p.constraints[i](x, &gi, &Hi);
        stat += duals[static_cast<Eigen::Index>(i)] * gi;
        comp += duals[static_cast<Eigen::Index>(i)] * std::abs(fi);
        r.primal = std::max(r.primal, fi);
    }
    r.stationarity = stat.lpNorm<Eigen::Infinity>() / (1.0 + g0.lpNorm<Eigen::Infinity>());
    r.complementarity = comp / (1.0 + std::abs(f0));
    return r;
}

namespace detail
{

// Barrier duals 1/(-t f_i) lose relative accuracy once f_i is near rounding level. Correct the
// multipliers of near-active constraints by least squares on the stationarity residual, with the
// step shortened to keep them nonnegative.
inline RVec refine_duals(const ConvexProgram &p, const RVec &x, const RVec &duals, double gap)
{
    RVec g0;
    p.objective(x, &g0, nullptr);
    const int m = static_cast<int>(p.constraints.size());
    RMat J(x.size(), m);
    std::vector<int> active;
    for (int i = 0; i < m; ++i)
    {
        RVec gi;
        double fi = p.constraints[i](x, &gi, nullptr);
        J.col(i) = gi;
        if (-fi <= 1e3 * gap)
            active.push_back(i);
    }
    RVec out = duals;
    if (active.empty())
        return out;
    RMat JA(x.size(), active.size());
    for (std::size_t j = 0; j < active.size(); ++j)
        JA.col(static_cast<Eigen::Index>(j)) = J.col(active[j]);
    Eigen::CompleteOrthogonalDecomposition<RMat> cod(JA);
    for (int round = 0; round < 5; ++round)
    {
        RVec r = g0 + J * out;
        RVec delta = cod.solve(-r);
        double step = 1.0;
        for (std::size_t j = 0; j < active.size(); ++j)
        {
            double d = delta[static_cast<Eigen::Index>(j)];
            if (d < 0.0)
                step = std::min(step, out[active[j]] / -d);
        }
        for (std::size_t j = 0; j < active.size(); ++j)
            out[active[j]] = std::max(0.0, out[active[j]] + step * delta[static_cast<Eigen::Index>(j)]);
        if (step == 1.0)
            break;
    }
    return out;
}

} // namespace detail

// Log-barrier interior-point method with damped Newton centering and backtracking.
// x0 must be strictly feasible.
inline BarrierResult barrier_solve(const ConvexProgram &p, const RVec &x0, const BarrierOptions &opt = {})
{
    BarrierResult res;
    res.x = x0;
    const double m = static_cast<double>(p.constraints.size());
    if (!detail::barrier_eval(p, x0, 1.0, false).finite)
    {
        res.message = "starting point is not strictly feasible";
        return res;
    }
    double t = opt.t0;
    RVec x = x0;
    for (int outer = 0; outer < opt.max_outer; ++outer)
    {
        for (int it = 0; it < opt.max_newton; ++it)
        {
            detail::BarrierEval e = detail::barrier_eval(p, x, t, true);
            RVec dx = detail::newton_direction(e.hess, e.grad);
            double decrement = -e.grad.dot(dx);
            if (decrement <= 0.0 || 0.5 * decrement <= opt.newton_tol)
                break;
            double step = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 80; ++ls)
            {
                RVec xn = x + step * dx;
                detail::BarrierEval en = detail::barrier_eval(p, xn, t, false);
                if (en.finite && en.value <= e.value - 0.01 * step * decrement)
                {
                    x = xn;
                    moved = true;
                    break;
                }
                // near the centre the value test drowns in rounding; fall back to the gradient norm
                if (en.finite && std::abs(en.value - e.value) <= 1e-12 * (1.0 + std::abs(e.value)))
                {
                    detail::BarrierEval eg = detail::barrier_eval(p, xn, t, true);
                    if (eg.finite && eg.grad.norm() < e.grad.norm())
                    {
                        x = xn;
                        moved = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            ++res.newton_steps;
            if (!moved)
                break;
        }
        double f0 = p.objective(x, nullptr, nullptr);
        if (m == 0.0 || m / t <= opt.gap_tol * (1.0 + std::abs(f0)))
        {
            res.converged = true;
            break;
        }
        t *= opt.mu;
    }
    res.x = x;
    res.objective = p.objective(x, nullptr, nullptr);
    res.duals.resize(static_cast<Eigen::Index>(p.constraints.size()));
    for (std::size_t i = 0; i < p.constraints.size(); ++i)
        res.duals[static_cast<Eigen::Index>(i)] = 1.0 / (-t * p.constraints[i](x, nullptr, nullptr));
    res.kkt = kkt_report(p, x, res.duals);
    RVec refined = detail::refine_duals(p, x, res.duals, m / t);
    KktReport alt = kkt_report(p, x, refined);
    if (alt.residual() < res.kkt.residual())
    {
        res.duals = refined;
        res.kkt = alt;
    }
    if (!res.converged)
        res.message = "barrier iteration limit reached";
    return res;
}

// Phase I: find a strictly feasible point by minimizing a common slack s with f_i(x) <= s.
// Stops once s < -margin. Returns nullopt-like empty vector when the set has no interior.
inline RVec find_strictly_feasible(const ConvexProgram &p, const RVec &x0, double margin = 1e-6)
{
    const int n = p.dim;
    double worst = -std::numeric_limits<double>::infinity();
    for (const SmoothFn &c : p.constraints)
        worst = std::max(worst, c(x0, nullptr, nullptr));
    if (!std::isfinite(worst))
        return {};
    if (worst < -margin)
        return x0;
    ConvexProgram aux;
    aux.dim = n + 1;
    aux.objective = [n](const RVec &z, RVec *g, RMat *H) {
        if (g)
            *g = RVec::Unit(n + 1, n);
        if (H)
            *H = RMat::Zero(n + 1, n + 1);
        return z[n];
    };
    for (const SmoothFn &c : p.constraints)
        aux.constraints.push_back([c, n](const RVec &z, RVec *g, RMat *H) {
            RVec gi;
            RMat Hi;
            double v = c(z.head(n), g ? &gi : nullptr, H ? &Hi : nullptr);
            if (g)
            {
                g->resize(n + 1);
                g->head(n) = gi;
                (*g)[n] = -1.0;
            }
            if (H)
            {
                *H = RMat::Zero(n + 1, n + 1);
                H->topLeftCorner(n, n) = Hi;
            }
            return v - z[n];
        });
    // keeps the auxiliary problem bounded below
    aux.constraints.push_back([n](const RVec &z, RVec *g, RMat *H) {
        if (g)
            *g = -RVec::Unit(n + 1, n);
        if (H)
            *H = RMat::Zero(n + 1, n + 1);
        return -z[n] - 1.0;
    });
    RVec z(n + 1);
    z.head(n) = x0;
    z[n] = std::max(worst, 0.0) + 1.0;
    BarrierOptions opt;
    opt.gap_tol = 1e-10;
    BarrierResult r = barrier_solve(aux, z, opt);
    if (r.x[n] < -margin)
        return r.x.head(n);
    return {};
}

} // namespace simswipt
