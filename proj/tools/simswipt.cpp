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

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace simswipt;

namespace
{

struct Common
{
    std::string config;
    std::string out;
    std::string policy;
    std::uint64_t seed = 0;
    int trials = 0;
    bool seed_set = false;
};

Config load_config(const Common &c)
{
    Config cfg = c.config.empty() ? Config() : Config::from_file(c.config);
    if (c.seed_set)
        cfg.set("run.seed", std::to_string(c.seed));
    else if (const char *env = std::getenv("SIMSWIPT_SEED"))
        cfg.set("run.seed", env);
    if (c.trials > 0)
        cfg.set("run.trials", std::to_string(c.trials));
    if (!c.policy.empty())
    {
        if (c.policy == "HPS" || c.policy == "EQPS" || c.policy == "RDPS")
            cfg.set("policy.phase", c.policy);
        else if (c.policy == "CTDE" || c.policy == "CTCE")
        {
            cfg.set("policy.resource", c.policy);
            cfg.set("drl.mode", c.policy);
        }
        else
            cfg.set("policy.resource", c.policy);
    }
    return cfg;
}

std::string out_dir(const Common &c)
{
    std::string d = c.out;
    if (d.empty())
        if (const char *env = std::getenv("SIMSWIPT_OUT"))
            d = env;
    if (d.empty())
        d = "simswipt_out";
    std::filesystem::create_directories(d);
    return d;
}

std::string join(const std::string &dir, const std::string &file) { return (std::filesystem::path(dir) / file).string(); }

int cmd_validate(const Common &c)
{
    Config cfg = load_config(c);
    ValidationOptions o;
    o.seed = cfg.get_u64("run.seed");
    o.trials = static_cast<int>(cfg.get_int("run.trials"));
    o.out = out_dir(c);
    int failed = 0, total = 0;
    run_validation(o, [&](const CriterionResult &r) {
        ++total;
        failed += !r.pass;
        std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " " << r.name << ": " << r.detail << std::endl;
    });
    std::cout << "summary command=validate passed=" << total - failed << " failed=" << failed
              << " seed=" << o.seed << " config_hash=" << cfg.hash_hex() << " out=" << o.out << std::endl;
    return failed ? 1 : 0;
}

int cmd_sweep(const Common &c)
{
    Config cfg = load_config(c);
    ExperimentConfig e = ExperimentConfig::from(cfg);
    const std::string dir = out_dir(c);
    auto rows = run_sweep(e);
    write_sweep_csv(join(dir, "sweep.csv"), e.config_hash, rows);
    int failed = 0;
    for (const auto &r : rows)
        failed += !r.error.empty();
    std::cout << "summary command=sweep axis=" << e.axis << " rows=" << rows.size() << " cells_with_errors=" << failed
              << " config_hash=" << e.config_hash << " out=" << join(dir, "sweep.csv") << std::endl;
    return 0;
}

int cmd_jappa(const Common &c)
{
    Config cfg = load_config(c);
    ExperimentConfig e = ExperimentConfig::from(cfg);
    const std::string dir = out_dir(c);
    JappaExperiment x = run_jappa_experiment(e);
    write_sca_trace_csv(join(dir, "sca_trace.csv"), e.config_hash, x.result);
    const JappaResult &r = x.result;
    std::cout << "summary command=jappa feasible=" << r.feasible << " converged=" << r.converged
              << " iterations=" << r.trace.size() << " sum_he_w=" << CsvWriter::num(r.feasible ? r.report.energy.sum_harvested : 0.0)
              << " min_se=" << CsvWriter::num(r.feasible ? r.report.min_se : 0.0)
              << " best_rapepa_w=" << CsvWriter::num(x.best_rapepa) << " max_kkt=" << CsvWriter::num(r.max_kkt())
              << " config_hash=" << e.config_hash << " out=" << join(dir, "sca_trace.csv") << std::endl;
    if (!r.feasible)
        std::cerr << "jappa: " << r.message << "\n";
    return r.feasible ? 0 : 1;
}

int cmd_train(const Common &c)
{
    Config cfg = load_config(c);
    ExperimentConfig e = ExperimentConfig::from(cfg);
    const std::string dir = out_dir(c);
    TrainingExperiment x = run_training(e, e.drl.mode);
    write_learning_csv(join(dir, "learning_curve.csv"), e.config_hash, x.result);
    for (std::size_t i = 0; i < x.result.actors.size(); ++i)
        x.result.actors[i].save(join(dir, "actor_" + std::to_string(i) + ".bin"));
    x.result.critic.save(join(dir, "critic.bin"));
    std::cout << "summary command=train mode=" << (e.drl.mode == TrainMode::ctde ? "CTDE" : "CTCE")
              << " episodes=" << x.result.episode_reward.size() << " final_mean=" << CsvWriter::num(x.final_mean)
              << " random_mean=" << CsvWriter::num(x.random_mean) << " se_target=" << CsvWriter::num(x.se_target)
              << " config_hash=" << e.config_hash << " out=" << dir << std::endl;
    return 0;
}

int cmd_passivity(const Common &c)
{
    Config cfg = load_config(c);
    ExperimentConfig e = ExperimentConfig::from(cfg);
    const std::string dir = out_dir(c);
    auto rows = passivity_table({40, 36, 32, 28}, {10, 8, 6, 5, 4, 3}, e.antennas, e.rows, e.wavelength);
    write_passivity_csv(join(dir, "passivity.csv"), e.config_hash, rows);
    std::cout << "S   L  T/lambda  inter-layer norm  admissible\n";
    for (const auto &r : rows)
        std::printf("%-3d %-2d %-9g %-17.4f %s\n", r.elements, r.layers, r.thickness_wl, r.inter_norm,
                    r.admissible ? "yes" : "no");
    std::cout << "summary command=passivity-table rows=" << rows.size() << " config_hash=" << e.config_hash
              << " out=" << join(dir, "passivity.csv") << std::endl;
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"simswipt: SIM-assisted cell-free massive MIMO SWIPT toolkit"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", common.config, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "master seed (overrides run.seed and SIMSWIPT_SEED)")
            ->each([&](const std::string &) { common.seed_set = true; });
        sub->add_option("--out", common.out, "output directory (default SIMSWIPT_OUT or ./simswipt_out)");
        sub->add_option("--trials", common.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
        sub->add_option("--policy", common.policy, "HPS|EQPS|RDPS or RAPEPA|JAPPA|CTDE|CTCE")
            ->check(CLI::IsMember({"HPS", "EQPS", "RDPS", "RAPEPA", "JAPPA", "CTDE", "CTCE"}));
    };
    std::function<int(const Common &)> action;
    auto bind = [&](CLI::App *sub, std::function<int(const Common &)> fn) {
        add_common(sub);
        sub->callback([&action, fn] { action = fn; });
    };
    bind(app.add_subcommand("validate", "run the acceptance and oracle suite"), cmd_validate);
    bind(app.add_subcommand("sweep", "average metrics over realizations along one axis"), cmd_sweep);
    bind(app.add_subcommand("jappa", "joint AP mode and power allocation on one realization"), cmd_jappa);
    bind(app.add_subcommand("train", "train CTDE or CTCE agents"), cmd_train);
    bind(app.add_subcommand("passivity-table", "spectral norms of the inter-layer propagation"), cmd_passivity);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try
    {
        return action(common);
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "usage error: " << e.what() << "\n" << app.help();
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
