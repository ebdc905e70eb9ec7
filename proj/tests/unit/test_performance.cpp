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

#include "simswipt/harness.hpp"
#include "simswipt/montecarlo.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace simswipt;
using Catch::Approx;

namespace
{

ExperimentConfig small_config()
{
    ExperimentConfig c = ExperimentConfig::from(Config());
    c.topology.aps = 3;
    c.topology.info_rx = 2;
    c.topology.energy_rx = 2;
    c.antennas = 8;
    c.elements = 16;
    c.layers = 2;
    return c;
}

ResourceDecision half_split(int M, int KI, int KE, const RVec &mode)
{
    ResourceDecision d;
    d.mode = mode;
    d.eta_info = RMat::Zero(M, KI);
    d.eta_energy = RMat::Zero(M, KE);
    for (int m = 0; m < M; ++m)
    {
        if (mode[m] == 1.0)
            d.eta_info.row(m).setConstant(1.0 / KI);
        else
            d.eta_energy.row(m).setConstant(1.0 / KE);
    }
    return d;
}

} // namespace

TEST_CASE("harvester response endpoints")
{
    SystemParams sys;
    CHECK(sys.omega() == Approx(1.0 / (1.0 + std::exp(3.6))));
    CHECK(sys.omega() == Approx(0.02660).epsilon(1e-3));
    CHECK(nleh(0.0, sys) == 0.0);
    const double om = sys.omega();
    double mid = (logistic(sys.chi, sys) - sys.phi * om) / (1.0 - om);
    CHECK(mid == Approx((sys.phi / 2 - sys.phi * om) / (1.0 - om)));
    CHECK(nleh(sys.chi, sys) == Approx(mid).epsilon(1e-12));
    for (double x : {1e-6, 1e-3, 0.01, 0.05})
        CHECK(nleh(x, sys) == Approx((logistic(x, sys) - sys.phi * om) / (1.0 - om)).epsilon(1e-9));
}

TEST_CASE("no downlink power gives zero SE and noise-only energy")
{
    ExperimentConfig c = small_config();
    Scenario s = build_scenario(c, 0, PhasePolicy::eqps);
    ResourceDecision d = half_split(3, 2, 2, RVec::Ones(3));
    s.ns.sys.dl_power = 0.0;
    InfoTerms it = info_terms(s.ns, s.alpha, s.gains, d);
    CHECK(it.sinr.cwiseAbs().maxCoeff() == 0.0);
    CHECK(it.se.cwiseAbs().maxCoeff() == 0.0);

    Scenario z = build_scenario(c, 0, PhasePolicy::eqps);
    ResourceDecision off = half_split(3, 2, 2, RVec::Zero(3));
    off.eta_energy.setZero();
    EnergyTerms et = energy_terms(z.ns, z.gains, off);
    const double block = z.ns.sys.coherence_len - z.ns.plan.length;
    for (int e = 0; e < 2; ++e)
        CHECK(et.q[e] == Approx(block * z.ns.sys.noise_power).epsilon(1e-12));
}

TEST_CASE("single E-AP energy reduces to the serving term")
{
    ExperimentConfig c = small_config();
    c.topology.aps = 1;
    c.topology.info_rx = 0;
    c.topology.energy_rx = 1;
    Scenario s = build_scenario(c, 2, PhasePolicy::eqps);
    ResourceDecision d = half_split(1, 0, 1, RVec::Zero(1));
    d.eta_energy(0, 0) = 0.6;
    EnergyTerms et = energy_terms(s.ns, s.gains, d);
    const double block = s.ns.sys.coherence_len - s.ns.plan.length;
    const double rho = s.ns.sys.rho_d();
    double expected = block * s.ns.sys.noise_power * rho * (0.6 * s.gains.energy_pmrt[0](0, 0) + 1.0 / rho);
    CHECK(et.q[0] == Approx(expected).epsilon(1e-12));
}

TEST_CASE("energy cross terms vanish for silent ERs")
{
    ExperimentConfig c = small_config();
    Scenario s = build_scenario(c, 1, PhasePolicy::eqps);
    ResourceDecision d = half_split(3, 2, 2, RVec::Zero(3));
    ResourceDecision one = d;
    one.eta_energy.col(1).setZero();
    ResourceDecision none = d;
    none.eta_energy.setZero();
    EnergyTerms a = energy_terms(s.ns, s.gains, one), b = energy_terms(s.ns, s.gains, none);
    const double rho = s.ns.sys.rho_d();
    const double block = s.ns.sys.coherence_len - s.ns.plan.length;
    double serving = 0.0;
    for (int m = 0; m < 3; ++m)
        serving += one.eta_energy(m, 0) * s.gains.energy_pmrt[m](0, 0);
    CHECK(a.q[0] - b.q[0] == Approx(block * s.ns.sys.noise_power * rho * serving).epsilon(1e-9));
}

TEST_CASE("interference-free SINR with perfect estimation")
{
    ExperimentConfig c = small_config();
    c.topology.energy_rx = 1;
    c.sys.ul_power = 1e14;
    Scenario s = build_scenario(c, 3, PhasePolicy::eqps);
    ResourceDecision d = half_split(3, 2, 1, RVec::Ones(3));
    InfoTerms it = info_terms(s.ns, s.alpha, s.gains, d);
    const double rho = s.ns.sys.rho_d();
    for (int k = 0; k < 2; ++k)
    {
        double coh = 0.0;
        for (int m = 0; m < 3; ++m)
            coh += s.alpha.zf(m, k) * std::sqrt(rho * d.eta_info(m, k));
        CHECK(it.sinr[k] == Approx(coh * coh).epsilon(1e-4));
    }
}

TEST_CASE("exact CSI removes energy-user interference")
{
    ExperimentConfig c = small_config();
    Scenario s = build_scenario(c, 0, PhasePolicy::rdps);
    RVec mode(3);
    mode << 1, 0, 0;
    ResourceDecision d = half_split(3, 2, 2, mode);
    OracleResult r = monte_carlo(s.topo, s.ns, s.alpha, d, 200, CounterRng(4), true);
    for (int k = 0; k < 2; ++k)
        CHECK(r.eui[k].mean <= 1e-20 * std::max(1.0, r.ds[k].mean * r.ds[k].mean));
}

TEST_CASE("evaluate flags QoS targets")
{
    ExperimentConfig c = small_config();
    c.sys.se_target = 1e6;
    Scenario s = build_scenario(c, 0, PhasePolicy::eqps);
    RVec mode(3);
    mode << 1, 0, 1;
    PerformanceReport rep = evaluate(s.ns, s.alpha, s.gains, half_split(3, 2, 2, mode));
    CHECK_FALSE(rep.qos_ok);
    CHECK(rep.se_ok.size() == 2);
    CHECK(rep.min_se == Approx(rep.info.se.minCoeff()));
    CHECK(rep.energy.sum_harvested == Approx(rep.energy.harvested.sum()));
}
