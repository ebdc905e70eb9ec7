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

#include "simswipt/precoding.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace simswipt;
using Catch::Approx;

namespace
{

struct Small
{
    SimGeometry geom;
    Topology topo;
    CMat F;
};

Small small_network(int info_rx, int energy_rx, double kappa, std::uint64_t seed, int N = 4, int S = 8)
{
    Small s;
    s.geom = SimGeometry::make(S, 2, 1, N, 0.0857, 4.0);
    TopologyParams p;
    p.aps = 1;
    p.info_rx = info_rx;
    p.energy_rx = energy_rx;
    p.kappa = kappa;
    CounterRng rng(seed);
    s.topo = generate_topology(p, s.geom, rng);
    CounterRng ph(seed + 1);
    RMat th(1, S);
    for (int i = 0; i < S; ++i)
        th(0, i) = uniform(ph, 0.0, two_pi);
    s.F = sim_cascade(SimPropagation::build(s.geom), th).F;
    return s;
}

CMat random_matrix(int r, int c, CounterRng &rng)
{
    CMat A(r, c);
    for (int j = 0; j < c; ++j)
        A.col(j) = complex_normal(rng, r);
    return A;
}

} // namespace

TEST_CASE("pilot assignment with reuse")
{
    PilotPlan p = assign_pilots(3, 4, 0, 3);
    CHECK(p.length == 4);
    CHECK(p.pilot == std::vector<int>{0, 1, 2, 3, 3, 3, 3});
    PilotPlan q = assign_pilots(3, 2, 0, 0);
    for (int k = 0; k < 5; ++k)
        CHECK(q.copilots[k] == std::vector<int>{k});
    PilotPlan r = assign_pilots(4, 3, 2, 1);
    for (int k = 0; k < 7; ++k)
        for (int j = 0; j < 7; ++j)
        {
            bool kj = std::find(r.copilots[k].begin(), r.copilots[k].end(), j) != r.copilots[k].end();
            bool jk = std::find(r.copilots[j].begin(), r.copilots[j].end(), k) != r.copilots[j].end();
            CHECK(kj == jk);
        }
    CHECK_THROWS_AS(assign_pilots(2, 2, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(assign_pilots(2, 2, 0, 3), std::invalid_argument);
}

TEST_CASE("pilot projection sums co-pilot channels")
{
    PilotPlan plan = assign_pilots(2, 2, 1, 0);
    SystemParams sys;
    sys.noise_power = 1e-300;
    CounterRng rng(5);
    CMat g = random_matrix(4, 4, rng);
    auto y = received_pilot(g, plan, sys, rng);
    const double amp = std::sqrt(plan.length * sys.rho_u());
    CHECK(y[0].isApprox(amp * (g.col(0) + g.col(1))));
    CHECK(y[1].isApprox(amp * g.col(2)));
}

TEST_CASE("received pilot power matches its second moment")
{
    Small s = small_network(2, 1, 2.0, 9);
    PilotPlan plan = assign_pilots(2, 1, 1, 0);
    SystemParams sys;
    ApStatistics st = ap_statistics(s.topo, 0, s.F, plan, sys);
    CounterRng rng(21);
    const int T = 10000;
    double acc = 0.0, acc2 = 0.0;
    for (int t = 0; t < T; ++t)
    {
        CMat g(4, 3);
        for (int k = 0; k < 3; ++k)
            g.col(k) = sample_channel(s.topo.link(0, k), s.F, rng).g;
        double p = received_pilot(g, plan, sys, rng)[0].squaredNorm();
        acc += p / T;
        acc2 += p * p / T;
    }
    // co-pilot LoS means add coherently
    double expected = 4 * sys.noise_power +
                      plan.length * sys.rho_u() *
                          ((st.link[0].mean + st.link[1].mean).squaredNorm() +
                           (st.link[0].norm_gain + st.link[1].norm_gain) * s.F.squaredNorm());
    double se = std::sqrt((acc2 - acc * acc) / T);
    CHECK(std::abs(acc - expected) < 3.0 * se);
}

TEST_CASE("estimation quality limits")
{
    Small s = small_network(1, 1, 1.5, 4);
    PilotPlan plan = assign_pilots(1, 1, 0, 0);
    SystemParams strong;
    strong.ul_power = 1e12;
    ApStatistics st = ap_statistics(s.topo, 0, s.F, plan, strong);
    const LinkEstimate &le = st.link[0];
    CHECK(le.quality == Approx(le.norm_gain * s.F.squaredNorm()).epsilon(1e-6));
    CHECK(le.error_moment < 1e-6 * le.quality);
    SystemParams silent;
    silent.ul_power = 0.0;
    ApStatistics z = ap_statistics(s.topo, 0, s.F, plan, silent);
    CHECK(z.link[0].quality == 0.0);
}

TEST_CASE("MMSE estimate second moment matches the closed form")
{
    Small s = small_network(1, 1, 2.0, 13);
    PilotPlan plan = assign_pilots(2, 0, 1, 0); // one co-pilot pair
    TopologyParams p;
    p.aps = 1;
    p.info_rx = 2;
    p.energy_rx = 0;
    p.kappa = 2.0;
    CounterRng trng(13);
    Topology topo = generate_topology(p, s.geom, trng);
    SystemParams sys;
    ApStatistics st = ap_statistics(topo, 0, s.F, plan, sys);
    NetworkStatistics ns;
    ns.plan = plan;
    ns.sys = sys;
    ns.ap.push_back(st);
    ns.info_rx = 2;
    CounterRng rng(17);
    const int T = 10000;
    double acc = 0.0, acc2 = 0.0;
    for (int t = 0; t < T; ++t)
    {
        NetworkDraw d = draw_network(topo, ns, rng);
        double v = d.ghat[0].col(0).squaredNorm();
        acc += v / T;
        acc2 += v * v / T;
    }
    double expected = st.link[0].mean.squaredNorm() + st.link[0].quality;
    CHECK(std::abs(acc - expected) < 3.0 * std::sqrt((acc2 - acc * acc) / T));
}

TEST_CASE("zero-forcing directions null the other IRs")
{
    CounterRng rng(2);
    CMat G = random_matrix(4, 2, rng);
    CMat U = zf_directions(G);
    CMat cross = G.adjoint() * U;
    CHECK((cross - CMat::Identity(2, 2)).norm() < 1e-10);
    CMat pinv = G.completeOrthogonalDecomposition().pseudoInverse();
    CHECK((U - pinv.adjoint()).norm() < 1e-10 * U.norm());
    CMat Q = CMat::Identity(4, 2);
    CHECK((zf_directions(Q) - Q).norm() < 1e-14);
    CMat collinear(4, 2);
    collinear << G.col(0), G.col(0);
    CHECK_THROWS_AS(zf_directions(collinear), RankError);
    CHECK_THROWS_AS(zf_directions(random_matrix(2, 3, rng)), RankError);
}

TEST_CASE("protective MRT stays in the IR null space")
{
    CounterRng rng(8);
    CMat G = random_matrix(6, 2, rng);
    CVec ge = complex_normal(rng, 6);
    CMat B = null_projector(G);
    CHECK((B * B - B).norm() < 1e-9 * B.norm());
    CVec w = pmrt_precoder(G, ge, 1.0);
    CHECK((G.adjoint() * w).norm() < 1e-10 * w.norm() * G.norm());
    CVec mrt = pmrt_precoder(CMat(6, 0), ge, 2.0);
    CHECK((mrt - 2.0 * ge).norm() < 1e-15);
}

TEST_CASE("normalisation factors in the pure scattering case")
{
    Small s = small_network(2, 2, 0.0, 31, 8, 8);
    PilotPlan plan = assign_pilots(2, 2, 0, 0);
    SystemParams sys;
    sys.ul_power = 1e12;
    ApStatistics st = ap_statistics(s.topo, 0, s.F, plan, sys);
    RVec a = alpha_zf_approx(st, plan, 2);
    RVec b = alpha_pmrt_approx(st, 2, 2);
    for (int k = 0; k < 2; ++k)
    {
        CHECK(a[k] == Approx(std::sqrt(st.link[k].quality)).epsilon(1e-9));
        CHECK(b[k] == Approx(1.0 / std::sqrt(st.link[2 + k].quality)).epsilon(1e-9));
    }
}

TEST_CASE("Monte Carlo normalisation standard error follows the square-root law")
{
    BatchMeans small(1000), large(2000);
    CounterRng rng(3);
    for (int i = 0; i < 2000; ++i)
    {
        double v = 1.0 + standard_normal(rng) * 0.1;
        if (i < 1000)
            small.add(v);
        large.add(v);
    }
    Estimate a = alpha_from_power(small), b = alpha_from_power(large);
    CHECK(a.std_error / b.std_error == Approx(std::sqrt(2.0)).epsilon(0.2));
}
