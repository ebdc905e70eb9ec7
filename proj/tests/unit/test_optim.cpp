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

#include "simswipt/validation.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace simswipt;
using Catch::Approx;

namespace
{

// Same program in permuted coordinates: y = x(perm), f'(y) = f(x)
ConvexProgram permuted(const ConvexProgram &p, const std::vector<int> &perm)
{
    auto wrap = [perm](SmoothFn f) -> SmoothFn {
        return [f, perm](const RVec &y, RVec *g, RMat *H) {
            const Eigen::Index n = y.size();
            RVec x(n);
            for (Eigen::Index i = 0; i < n; ++i)
                x[perm[i]] = y[i];
            RVec gx;
            RMat Hx;
            double v = f(x, g ? &gx : nullptr, H ? &Hx : nullptr);
            if (g)
            {
                g->resize(n);
                for (Eigen::Index i = 0; i < n; ++i)
                    (*g)[i] = gx[perm[i]];
            }
            if (H)
            {
                H->resize(n, n);
                for (Eigen::Index i = 0; i < n; ++i)
                    for (Eigen::Index j = 0; j < n; ++j)
                        (*H)(i, j) = Hx(perm[i], perm[j]);
            }
            return v;
        };
    };
    ConvexProgram q;
    q.dim = p.dim;
    q.objective = wrap(p.objective);
    for (const auto &c : p.constraints)
        q.constraints.push_back(wrap(c));
    return q;
}

ExperimentConfig jappa_config()
{
    ExperimentConfig c = ExperimentConfig::from(Config());
    c.topology.aps = 3;
    c.antennas = 8;
    c.phase = PhasePolicy::eqps;
    return c;
}

} // namespace

TEST_CASE("logistic inverse")
{
    SystemParams sys;
    CHECK(inverse_logistic(sys.phi / 2, sys) == Approx(sys.chi).epsilon(1e-14));
    for (double x : {sys.chi - 0.01, sys.chi, sys.chi + 0.01})
        CHECK(std::abs(inverse_logistic(logistic(x, sys), sys) - x) < 1e-9);
    CHECK_THROWS_AS(inverse_logistic(0.0, sys), std::domain_error);
    CHECK_THROWS_AS(inverse_logistic(sys.phi, sys), std::domain_error);
}

TEST_CASE("required input matches a bisection root")
{
    SystemParams sys;
    const double target = 1e-5;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i)
    {
        double mid = 0.5 * (lo + hi);
        (nleh(mid, sys) < target ? lo : hi) = mid;
    }
    CHECK(required_input(target, sys) == Approx(0.5 * (lo + hi)).epsilon(1e-10));
    CHECK(required_input(0.0, sys) == 0.0);
}

TEST_CASE("majorant of the logistic inverse")
{
    SystemParams sys;
    CounterRng rng(12);
    for (int i = 0; i < 100; ++i)
    {
        double t = uniform(rng, 1e-4, 0.99) * sys.phi, a = uniform(rng, 1e-4, 0.99) * sys.phi;
        CHECK(xi_upper_bound(a, a, sys) == Approx(inverse_logistic(a, sys)).epsilon(1e-12));
        CHECK(xi_upper_bound(t, a, sys) >= inverse_logistic(t, sys) - 1e-15);
        double t2 = uniform(rng, 1e-4, 0.99) * sys.phi;
        double mid = xi_upper_bound(0.5 * (t + t2), a, sys);
        CHECK(mid <= 0.5 * (xi_upper_bound(t, a, sys) + xi_upper_bound(t2, a, sys)) + 1e-15);
    }
}

TEST_CASE("majorant of the required input in the harvested power")
{
    SystemParams sys;
    CounterRng rng(14);
    for (int i = 0; i < 100; ++i)
    {
        double e = uniform(rng, 0.0, 0.9) * sys.phi, a = uniform(rng, 0.0, 0.9) * sys.phi;
        CHECK(required_input_upper(a, a, sys) == Approx(required_input(a, sys)).epsilon(1e-10).margin(1e-15));
        CHECK(required_input_upper(e, a, sys) >= required_input(e, sys) - 1e-15);
        double d1 = 0.0, d2 = 0.0;
        required_input_upper(e, a, sys, &d1, &d2);
        const double h = 1e-7 * sys.phi;
        double fd = (required_input_upper(e + h, a, sys) - required_input_upper(e - h, a, sys)) / (2 * h);
        CHECK(d1 == Approx(fd).epsilon(1e-5));
        CHECK(d2 >= 0.0);
    }
}

TEST_CASE("quadratic lower bound")
{
    CHECK(quadratic_lower_bound(0.7, 0.7) == Approx(0.49));
    CHECK(quadratic_lower_bound(0.3, 0.0) == 0.0);
    CounterRng rng(2);
    for (int i = 0; i < 100; ++i)
    {
        double x = uniform(rng, -2, 2), x0 = uniform(rng, -2, 2);
        CHECK(quadratic_lower_bound(x, x0) <= x * x + 1e-15);
    }
}

TEST_CASE("barrier solver on a box")
{
    ConvexProgram p;
    p.dim = 3;
    RVec c(3);
    c << 0.5, -1.0, 2.0;
    p.objective = [](const RVec &x, RVec *g, RMat *H) {
        if (g)
            *g = -RVec::Ones(x.size());
        if (H)
            *H = RMat::Zero(x.size(), x.size());
        return -x.sum();
    };
    for (int i = 0; i < 3; ++i)
        p.constraints.push_back([i, c](const RVec &x, RVec *g, RMat *H) {
            if (g)
                *g = RVec::Unit(x.size(), i);
            if (H)
                *H = RMat::Zero(x.size(), x.size());
            return x[i] - c[i];
        });
    BarrierResult r = barrier_solve(p, c.array() - 1.0);
    CHECK(r.converged);
    CHECK((r.x - c).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(r.kkt.residual() < 1e-6);
    BarrierResult bad = barrier_solve(p, c);
    CHECK_FALSE(bad.converged);
}

TEST_CASE("barrier solver recovers planted optima")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        CounterRng rng(seed);
        PlantedQcqp q = planted_qcqp(6, 5, 3, rng);
        BarrierResult r = barrier_solve(q.program, RVec::Zero(6));
        CHECK((r.x - q.optimum).cwiseAbs().maxCoeff() < 1e-5);
        CHECK(r.kkt.residual() < 1e-6);

        std::vector<int> perm{3, 0, 5, 1, 4, 2};
        BarrierResult rp = barrier_solve(permuted(q.program, perm), RVec::Zero(6));
        for (int i = 0; i < 6; ++i)
            CHECK(std::abs(rp.x[i] - r.x[perm[i]]) < 1e-6);
    }
}

TEST_CASE("phase I finds an interior point")
{
    CounterRng rng(3);
    PlantedQcqp q = planted_qcqp(4, 3, 2, rng);
    RVec start = RVec::Constant(4, 5.0);
    RVec y = find_strictly_feasible(q.program, start);
    REQUIRE(y.size() == 4);
    for (const auto &c : q.program.constraints)
        CHECK(c(y, nullptr, nullptr) < 0.0);
}

TEST_CASE("joint allocation surrogate properties")
{
    ExperimentConfig c = jappa_config();
    Scenario s = build_scenario(c, 0, c.phase);
    JappaModel model(s.ns, s.alpha, s.gains, 1e-6);
    model.layout(true, RVec());
    const int M = 3;
    RVec binary(M);
    binary << 1, 0, 1;
    RMat amps = RMat::Constant(M, 2, 0.3), pows = RMat::Constant(M, 2, 0.2);
    RVec v = RVec::Constant(2, 0.5);
    RVec xb = model.pack(binary, amps, pows, v);
    CHECK(model.penalized_objective(xb, 10.0) == Approx(v.sum()));
    CHECK(model.max_binarity(xb) == 0.0);

    RVec x = model.pack(RVec::Constant(M, 0.4), amps, pows, v);
    JappaModel::Built b = model.build(x, 10.0);
    REQUIRE(!b.original.empty());
    for (std::size_t i = 0; i < b.original.size(); ++i)
    {
        double sur = b.program.constraints[i](x, nullptr, nullptr), orig = b.original[i](x, nullptr, nullptr);
        CHECK(std::abs(sur - orig) <= 1e-9 * (1.0 + std::abs(orig)));
    }

    RVec zero = model.pack(RVec::Constant(M, 0.5), RMat::Zero(M, 2), RMat::Zero(M, 2),
                           RVec::Constant(2, s.ns.sys.energy_target / 1e-6));
    JappaModel::Built bz = model.build(zero, 10.0);
    double worst = -1.0;
    for (const auto &f : bz.original)
        worst = std::max(worst, f(zero, nullptr, nullptr));
    CHECK(worst > 0.0);
}

TEST_CASE("joint allocation trace is monotone and ends binary")
{
    ExperimentConfig c = jappa_config();
    Scenario s = build_scenario(c, 1, c.phase);
    JappaResult unreachable = jappa(s.ns, s.alpha, s.gains, c.jappa);
    CHECK_FALSE(unreachable.feasible);
    CHECK(unreachable.trace.empty());
    CHECK_FALSE(unreachable.message.empty());

    c.rapepa_draws = 100;
    JappaResult r = run_jappa_experiment(c, 1).result;
    REQUIRE(!r.trace.empty());
    for (std::size_t i = 1; i < r.trace.size(); ++i)
        CHECK(r.trace[i].objective >= r.trace[i - 1].objective);
    for (std::size_t i = 1; i < r.polish.size(); ++i)
        CHECK(r.polish[i].objective >= r.polish[i - 1].objective);
    for (const auto &t : r.trace)
        CHECK(t.tangency < 1e-6);
    for (int m = 0; m < 3; ++m)
        CHECK((r.decision.mode[m] == 0.0 || r.decision.mode[m] == 1.0));
    CHECK(r.max_kkt() < 1e-6);
}
