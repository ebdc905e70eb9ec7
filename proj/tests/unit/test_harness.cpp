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

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

using namespace simswipt;
using Catch::Approx;

namespace
{

ExperimentConfig sweep_config()
{
    ExperimentConfig c = ExperimentConfig::from(Config());
    c.topology.aps = 3;
    c.antennas = 8;
    c.candidates = 10;
    c.realizations = 2;
    c.values = {2, 6};
    c.phase_policies = {PhasePolicy::eqps, PhasePolicy::rdps};
    return c;
}

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), {});
}

} // namespace

TEST_CASE("experiment configuration from defaults and overrides")
{
    ExperimentConfig c = ExperimentConfig::from(Config::from_text("topology.M = 5\ngeom.S = 36\ngeom.rows = 6\n"));
    CHECK(c.topology.aps == 5);
    CHECK(c.geometry().elements == 36);
    CHECK(c.rapepa_reference() == 2);
    CHECK(c.with_axis("L", 3).layers == 3);
    CHECK(c.with_axis("kappa", 9).topology.kappa == 9.0);
    CHECK_THROWS_AS(c.with_axis("bogus", 1), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from(Config::from_text("policy.resource = XYZ")), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from(Config::from_text("drl.reward_tradeoff = 2")), std::invalid_argument);
}

TEST_CASE("scenarios are seeded by realization")
{
    ExperimentConfig c = sweep_config();
    Scenario a = build_scenario(c, 3, PhasePolicy::rdps), b = build_scenario(c, 3, PhasePolicy::rdps);
    Scenario other = build_scenario(c, 4, PhasePolicy::rdps);
    CHECK(a.topo.beta == b.topo.beta);
    CHECK(a.phases[0] == b.phases[0]);
    CHECK(a.topo.beta != other.topo.beta);
    Scenario eq = build_scenario(c, 3, PhasePolicy::eqps);
    CHECK(eq.topo.beta == a.topo.beta);
}

TEST_CASE("median helper")
{
    CHECK(median({}) == 0.0);
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}

TEST_CASE("sweep emits one row per value, policy and metric")
{
    ExperimentConfig c = sweep_config();
    auto rows = run_sweep(c);
    CHECK(rows.size() == c.values.size() * c.phase_policies.size() * 2);
    for (const auto &r : rows)
    {
        CHECK(r.error.empty());
        CHECK(r.seeds == 2);
        CHECK(std::isfinite(r.mean));
    }
    ExperimentConfig bad = c;
    bad.resource = "CTDE";
    CHECK_THROWS_AS(run_sweep(bad), std::invalid_argument);
}

TEST_CASE("sweep CSV is byte-identical across runs")
{
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "simswipt_unit_csv";
    fs::create_directories(dir);
    ExperimentConfig c = sweep_config();
    write_sweep_csv((dir / "a.csv").string(), "abc", run_sweep(c));
    write_sweep_csv((dir / "b.csv").string(), "abc", run_sweep(c));
    std::string a = slurp(dir / "a.csv");
    CHECK(a == slurp(dir / "b.csv"));
    CHECK(a.rfind("# config_hash=abc\naxis,value,policy,metric,mean,stderr,seeds,error\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("passivity table admissibility pattern")
{
    auto rows = passivity_table({36, 40}, {4.0}, 32, 4, 0.0857);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].layers == assumed_layers(36));
    CHECK(rows[0].admissible);
    CHECK_FALSE(rows[1].admissible);
}
