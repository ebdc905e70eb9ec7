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

#include "simswipt/heuristics.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace simswipt;
using Catch::Approx;

namespace
{

SimPropagation tiny_propagation(int S, int rows, int L)
{
    return SimPropagation::build(SimGeometry::make(S, rows, L, 4, 0.0857, 4.0));
}

} // namespace

TEST_CASE("phase policy names round trip")
{
    for (PhasePolicy p : {PhasePolicy::rdps, PhasePolicy::eqps, PhasePolicy::hps})
        CHECK(parse_phase_policy(to_string(p)) == p);
    CHECK_THROWS_AS(parse_phase_policy("XYZ"), std::invalid_argument);
}

TEST_CASE("single-candidate search keeps the first draw")
{
    SimPropagation p = tiny_propagation(16, 4, 2);
    CounterRng rng(5);
    HpsResult r = hps_search(p, 2, 1, rng);
    for (int l = 0; l < 2; ++l)
    {
        CounterRng d = rng.substream(static_cast<std::uint64_t>(l), 0);
        RVec first = uniform_candidates()(0, d, 16);
        CHECK((r.phases.row(l).transpose() - first).norm() == 0.0);
    }
    CHECK_THROWS_AS(hps_search(p, 2, 0, rng), std::invalid_argument);
}

TEST_CASE("per-layer record is the maximum of its candidates")
{
    SimPropagation p = tiny_propagation(16, 4, 3);
    HpsResult r = hps_search(p, 3, 12, CounterRng(9));
    REQUIRE(r.layer_best.size() == 3);
    for (int l = 0; l < 3; ++l)
        CHECK(r.layer_best[l] == *std::max_element(r.candidates[l].begin(), r.candidates[l].end()));
    CHECK(sim_cascade(p, r.phases).gram_trace == Approx(r.layer_best.back()));
    for (Eigen::Index i = 0; i < r.phases.size(); ++i)
    {
        CHECK(r.phases.data()[i] >= 0.0);
        CHECK(r.phases.data()[i] < two_pi);
    }
}

TEST_CASE("exhaustive binary alphabet reaches the brute-force optimum")
{
    SimPropagation p = tiny_propagation(4, 2, 1);
    HpsResult r = hps_search(p, 1, 16, CounterRng(1), alphabet_candidates({0.0, std::numbers::pi}));
    double best = 0.0;
    for (int code = 0; code < 16; ++code)
    {
        RMat th(1, 4);
        for (int s = 0; s < 4; ++s)
            th(0, s) = (code >> s) & 1 ? std::numbers::pi : 0.0;
        best = std::max(best, sim_cascade(p, th).gram_trace);
    }
    CHECK(r.layer_best.back() == best);
}

TEST_CASE("larger budget dominates under common random numbers")
{
    SimPropagation p = tiny_propagation(16, 4, 2);
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        CounterRng rng(seed);
        CHECK(hps_search(p, 2, 50, rng).layer_best.back() >= hps_search(p, 2, 1, rng).layer_best.back());
    }
}

TEST_CASE("equal phases are invariant to the common constant")
{
    SimPropagation p = tiny_propagation(16, 4, 2);
    double a = sim_cascade(p, eqps(2, 16, 0.0)).gram_trace;
    double b = sim_cascade(p, eqps(2, 16, 1.3)).gram_trace;
    CHECK(b == Approx(a).epsilon(1e-12));
    SimPropagation q = tiny_propagation(16, 4, 1);
    CHECK(sim_cascade(q, eqps(1, 16)).gram_trace == Approx(q.first.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("random phases are seeded, uniform and beaten by the search")
{
    CounterRng a(77), b(77);
    CHECK(rdps(2, 16, a) == rdps(2, 16, b));
    CounterRng u(3);
    RMat big = rdps(1, 10000, u);
    std::vector<double> v(big.data(), big.data() + big.size());
    std::sort(v.begin(), v.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        double cdf = v[i] / two_pi;
        ks = std::max({ks, std::abs(cdf - double(i) / v.size()), std::abs(cdf - double(i + 1) / v.size())});
    }
    CHECK(ks < 1.63 / std::sqrt(10000.0));

    SimPropagation p = tiny_propagation(16, 4, 2);
    CounterRng r(8);
    double mean = 0.0;
    for (int i = 0; i < 1000; ++i)
        mean += sim_cascade(p, rdps(2, 16, r)).gram_trace / 1000;
    CHECK(mean < hps_search(p, 2, 50, CounterRng(8)).layer_best.back());
}

TEST_CASE("random AP modes with equal power split")
{
    CounterRng rng(4);
    for (int i = 0; i < 50; ++i)
    {
        ResourceDecision d = rapepa(6, 3, 0, 2, 3, rng);
        CHECK(d.mode.sum() == 3.0);
        for (int m = 0; m < 6; ++m)
        {
            double total = d.mode[m] == 1.0 ? d.eta_info.row(m).sum() : d.eta_energy.row(m).sum();
            CHECK(total == 1.0);
        }
    }
    std::vector<int> hist(7, 0);
    for (int i = 0; i < 10000; ++i)
        ++hist[static_cast<int>(rapepa(6, 3, 1, 2, 2, rng).mode.sum())];
    for (int k : {2, 3, 4})
        CHECK(std::abs(hist[k] - 10000.0 / 3) < 4.0 * std::sqrt(10000.0 * (1.0 / 3) * (2.0 / 3)));
    CHECK(hist[0] + hist[1] + hist[5] + hist[6] == 0);
    CHECK_THROWS_AS(rapepa(4, 5, 0, 1, 1, rng), std::invalid_argument);
}
