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

#include "config.hpp"
#include "drl.hpp"
#include "heuristics.hpp"
#include "jappa.hpp"
#include "topology.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

namespace simswipt
{

struct ExperimentConfig
{
    TopologyParams topology;
    int antennas = 32, elements = 16, rows = 4, layers = 2;
    double wavelength = 0.0857, thickness_wl = 4.0, spacing_wl = 0.5;
    SystemParams sys;
    int reuse_info = 0, reuse_energy = 0;
    PhasePolicy phase = PhasePolicy::hps;
    std::string resource = "RAPEPA";
    int candidates = 100;
    int rapepa_spread = 1, rapepa_info_aps = -1;
    JappaOptions jappa;
    int rapepa_draws = 500;
    double jappa_qos_fraction = 0.5;
    DrlHyper drl;
    RewardOptions reward;
    double drl_qos_fraction = 1.0;
    int baseline_episodes = 30;
    std::uint64_t seed = 1;
    int trials = 10000, alpha_trials = 2000, realizations = 50;
    std::string axis = "kappa";
    std::vector<double> values;
    std::vector<PhasePolicy> phase_policies;
    std::string config_hash;

    static ExperimentConfig from(const Config &c)
    {
        ExperimentConfig e;
        e.topology.aps = static_cast<int>(c.get_int("topology.M"));
        e.topology.info_rx = static_cast<int>(c.get_int("topology.K_I"));
        e.topology.energy_rx = static_cast<int>(c.get_int("topology.K_E"));
        e.topology.area = c.get_double("topology.area_m");
        e.topology.ap_height = c.get_double("topology.ap_height_m");
        e.topology.rx_height = c.get_double("topology.rx_height_m");
        e.topology.kappa = c.get_double("topology.kappa");
        e.topology.pathloss.ref_loss_db = c.get_double("pathloss.ref_loss_db");
        e.topology.pathloss.d0 = c.get_double("pathloss.d0_m");
        e.topology.pathloss.d1 = c.get_double("pathloss.d1_m");
        e.topology.pathloss.far_slope_db = c.get_double("pathloss.far_slope_db");
        e.topology.pathloss.shadow_db = c.get_double("pathloss.shadow_db");
        e.antennas = static_cast<int>(c.get_int("geom.N"));
        e.elements = static_cast<int>(c.get_int("geom.S"));
        e.rows = static_cast<int>(c.get_int("geom.rows"));
        e.layers = static_cast<int>(c.get_int("geom.L"));
        e.wavelength = c.get_double("geom.wavelength_m");
        e.thickness_wl = c.get_double("geom.thickness_wl");
        e.spacing_wl = c.get_double("geom.spacing_wl");
        e.sys.coherence_len = static_cast<int>(c.get_int("system.tau_c"));
        e.sys.noise_power = dbm_to_watt(c.get_double("system.noise_dbm"));
        e.sys.dl_power = c.get_double("system.dl_power_w");
        e.sys.ul_power = c.get_double("system.ul_power_w");
        e.sys.xi = c.get_double("system.xi");
        e.sys.chi = c.get_double("system.chi");
        e.sys.phi = c.get_double("system.phi");
        e.sys.energy_target = c.get_double("system.energy_target_w");
        e.sys.se_target = c.get_double("system.se_target");
        e.reuse_info = static_cast<int>(c.get_int("pilot.reuse_info"));
        e.reuse_energy = static_cast<int>(c.get_int("pilot.reuse_energy"));
        e.phase = parse_phase_policy(c.get("policy.phase"));
        e.resource = c.get("policy.resource");
        if (e.resource != "RAPEPA" && e.resource != "JAPPA" && e.resource != "CTDE" && e.resource != "CTCE")
            throw std::invalid_argument("unknown resource policy: " + e.resource);
        e.candidates = static_cast<int>(c.get_int("heuristic.candidates"));
        e.rapepa_spread = static_cast<int>(c.get_int("heuristic.rapepa_spread"));
        e.rapepa_info_aps = static_cast<int>(c.get_int("heuristic.rapepa_info_aps"));
        e.jappa.penalty = c.get_double("jappa.penalty");
        e.jappa.max_iters = static_cast<int>(c.get_int("jappa.max_iters"));
        e.jappa.tol = c.get_double("jappa.tol");
        e.rapepa_draws = static_cast<int>(c.get_int("jappa.rapepa_draws"));
        e.jappa_qos_fraction = c.get_double("jappa.qos_fraction");
        e.drl.mode = parse_train_mode(c.get("drl.mode"));
        e.drl.episodes = static_cast<int>(c.get_int("drl.episodes"));
        e.drl.steps = static_cast<int>(c.get_int("drl.steps"));
        e.drl.hidden = {static_cast<int>(c.get_int("drl.hidden1")), static_cast<int>(c.get_int("drl.hidden2"))};
        e.drl.actor_lr = c.get_double("drl.actor_lr");
        e.drl.critic_lr = c.get_double("drl.critic_lr");
        e.drl.batch = static_cast<int>(c.get_int("drl.batch"));
        e.drl.discount = c.get_double("drl.discount");
        e.drl.soft_update = c.get_double("drl.soft_update");
        e.drl.noise_std = c.get_double("drl.noise_std");
        e.drl.noise_decay = c.get_double("drl.noise_decay");
        e.drl.replay = static_cast<std::size_t>(c.get_u64("drl.replay"));
        e.drl.grad_clip = c.get_double("drl.grad_clip");
        e.reward.tradeoff = c.get_double("drl.reward_tradeoff");
        e.reward.se_penalty = c.get_double("drl.se_penalty");
        const std::string pm = c.get("drl.se_penalty_mode");
        if (pm == "flat")
            e.reward.penalty_mode = SePenalty::flat;
        else if (pm == "proportional")
            e.reward.penalty_mode = SePenalty::proportional;
        else
            throw std::invalid_argument("drl.se_penalty_mode must be flat or proportional");
        e.drl_qos_fraction = c.get_double("drl.qos_fraction");
        e.baseline_episodes = static_cast<int>(c.get_int("drl.baseline_episodes"));
        e.seed = c.get_u64("run.seed");
        e.trials = static_cast<int>(c.get_int("run.trials"));
        e.alpha_trials = static_cast<int>(c.get_int("run.alpha_trials"));
        e.realizations = static_cast<int>(c.get_int("run.realizations"));
        e.axis = c.get("sweep.axis");
        e.values = c.get_list("sweep.values");
        for (const auto &p : c.get_strings("sweep.policies"))
            e.phase_policies.push_back(parse_phase_policy(p));
        e.config_hash = c.hash_hex();
        e.validate();
        return e;
    }

    void validate() const
    {
        if (topology.aps < 1 || topology.info_rx + topology.energy_rx < 1)
            throw std::invalid_argument("need M >= 1 and K >= 1");
        if (realizations < 1 || trials < 1 || alpha_trials < 1)
            throw std::invalid_argument("realizations and trial counts must be positive");
        if (!(reward.tradeoff >= 0.0 && reward.tradeoff <= 1.0))
            throw std::invalid_argument("drl.reward_tradeoff must lie in [0, 1]");
        geometry().validate();
    }

    SimGeometry geometry() const
    {
        return SimGeometry::make(elements, rows, layers, antennas, wavelength, thickness_wl, spacing_wl);
    }

    PilotPlan pilots() const
    {
        return assign_pilots(topology.info_rx, topology.energy_rx, reuse_info, reuse_energy);
    }

    int rapepa_reference() const { return rapepa_info_aps >= 0 ? rapepa_info_aps : topology.aps / 2; }

    // Copy with one sweep axis set to value
    ExperimentConfig with_axis(const std::string &name, double value) const
    {
        ExperimentConfig e = *this;
        if (name == "M")
            e.topology.aps = static_cast<int>(value);
        else if (name == "S")
            e.elements = static_cast<int>(value);
        else if (name == "L")
            e.layers = static_cast<int>(value);
        else if (name == "T_SIM")
            e.thickness_wl = value;
        else if (name == "S_ki")
            e.sys.se_target = value;
        else if (name == "kappa")
            e.topology.kappa = value;
        else
            throw std::invalid_argument("unknown sweep axis: " + name);
        e.validate();
        return e;
    }
};

// Everything derived from one network realization under fixed phases
struct Scenario
{
    SimGeometry geom;
    SimPropagation prop;
    Topology topo;
    std::vector<RMat> phases;
    NetworkStatistics ns;
    Normalization alpha;
    GainTables gains;
};

// Realization r draws its topology and phases from substreams keyed by r only, so every sweep
// value and phase policy sees the same positions and shadowing
inline Scenario build_scenario(const ExperimentConfig &c, std::uint64_t realization, PhasePolicy policy)
{
    Scenario s;
    s.geom = c.geometry();
    s.prop = SimPropagation::build(s.geom);
    CounterRng master(c.seed);
    CounterRng trng = master.substream(stream::topology, realization);
    s.topo = generate_topology(c.topology, s.geom, trng);
    s.phases = network_phases(policy, s.prop, c.topology.aps, c.layers, c.candidates,
                              master.substream(stream::phases, realization));
    std::vector<CMat> F;
    for (const auto &p : s.phases)
        F.push_back(sim_cascade(s.prop, p).F);
    s.ns = network_statistics(s.topo, F, c.pilots(), c.sys);
    s.alpha = alpha_approx(s.ns);
    s.gains = closed_form_gains(s.ns);
    return s;
}

inline std::vector<ResourceDecision> rapepa_draws(const ExperimentConfig &c, int count, CounterRng rng)
{
    std::vector<ResourceDecision> out;
    for (int i = 0; i < count; ++i)
        out.push_back(rapepa(c.topology.aps, c.rapepa_reference(), c.rapepa_spread, c.topology.info_rx,
                             c.topology.energy_rx, rng));
    return out;
}

inline double median(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct JappaExperiment
{
    Scenario scenario;
    JappaResult result;
    double se_target = 0.0, energy_target = 0.0;
    double best_rapepa = 0.0; // best sum-HE among QoS-feasible random draws
    int feasible_draws = 0;
};

// Desk-scale QoS: targets are a fraction of the median min-SE and min-HE achieved by random draws,
// so they are reachable at small M. A non-positive fraction keeps the configured targets.
inline JappaExperiment run_jappa_experiment(const ExperimentConfig &c, std::uint64_t realization = 0)
{
    JappaExperiment x;
    x.scenario = build_scenario(c, realization, c.phase);
    NetworkStatistics &ns = x.scenario.ns;
    CounterRng master(c.seed);
    auto draws = rapepa_draws(c, c.rapepa_draws, master.substream(stream::baseline, realization));
    if (c.jappa_qos_fraction > 0.0)
    {
        std::vector<double> se, he;
        for (const auto &d : draws)
        {
            PerformanceReport r = evaluate(ns, x.scenario.alpha, x.scenario.gains, d);
            se.push_back(r.min_se);
            he.push_back(r.energy.harvested.minCoeff());
        }
        ns.sys.se_target = c.jappa_qos_fraction * median(se);
        ns.sys.energy_target = c.jappa_qos_fraction * median(he);
    }
    x.se_target = ns.sys.se_target;
    x.energy_target = ns.sys.energy_target;
    for (const auto &d : draws)
    {
        PerformanceReport r = evaluate(ns, x.scenario.alpha, x.scenario.gains, d);
        if (r.qos_ok)
        {
            ++x.feasible_draws;
            x.best_rapepa = std::max(x.best_rapepa, r.energy.sum_harvested);
        }
    }
    x.result = jappa(ns, x.scenario.alpha, x.scenario.gains, c.jappa);
    return x;
}

struct TrainingExperiment
{
    TrainResult result;
    std::vector<double> random_rewards;
    double se_target = 0.0;
    double random_mean = 0.0, final_mean = 0.0; // final mean over the last tenth of episodes
};

// Training on realization 0; the SE target follows the desk QoS rule against random actions
inline TrainingExperiment run_training(const ExperimentConfig &c, TrainMode mode)
{
    TrainingExperiment x;
    SimGeometry geom = c.geometry();
    CounterRng master(c.seed);
    CounterRng trng = master.substream(stream::topology, 0);
    Topology topo = generate_topology(c.topology, geom, trng);
    SystemParams sys = c.sys;
    if (c.drl_qos_fraction > 0.0)
    {
        SwiptEnv probe(topo, geom, c.pilots(), sys, c.reward);
        CounterRng q = master.substream(stream::baseline, 1);
        std::vector<double> se;
        probe.reset();
        for (int i = 0; i < 400; ++i)
        {
            std::vector<RVec> raw;
            for (int m = 0; m < probe.agents(); ++m)
            {
                RVec a(probe.action_dim());
                for (Eigen::Index j = 0; j < a.size(); ++j)
                    a[j] = uniform01(q);
                raw.push_back(a);
            }
            StepResult r = probe.step(raw);
            se.push_back(r.se.size() ? r.se.minCoeff() : 0.0);
        }
        sys.se_target = c.drl_qos_fraction * median(se);
    }
    x.se_target = sys.se_target;
    SwiptEnv env(topo, geom, c.pilots(), sys, c.reward);
    x.random_rewards = random_policy_rewards(env, c.baseline_episodes, c.drl.steps, master.substream(stream::baseline, 2));
    for (double r : x.random_rewards)
        x.random_mean += r / static_cast<double>(x.random_rewards.size());
    DrlHyper hp = c.drl;
    hp.mode = mode;
    ActorCriticTrainer trainer(env, hp, master.substream(stream::learning, static_cast<std::uint64_t>(mode)));
    x.result = trainer.train();
    const int n = static_cast<int>(x.result.episode_reward.size());
    const int tail = std::max(1, n / 10);
    for (int i = n - tail; i < n; ++i)
        x.final_mean += x.result.episode_reward[i] / tail;
    return x;
}

struct SweepRow
{
    std::string axis;
    double value = 0.0;
    std::string policy;
    std::string metric;
    double mean = 0.0, std_error = 0.0;
    int seeds = 0;
    std::string error;
};

// Averages min-SE and sum-HE over realizations for every (value, phase policy) cell.
// Resource decisions come from the configured resource policy; RAPEPA uses one shared draw
// per realization so policies are compared under common random numbers.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig &c)
{
    if (c.resource != "RAPEPA" && c.resource != "JAPPA")
        throw std::invalid_argument("sweeps support the RAPEPA and JAPPA resource policies");
    std::vector<SweepRow> rows;
    const std::vector<std::string> metrics{"min_se", "sum_he"};
    for (double v : c.values)
    {
        ExperimentConfig cv = c.with_axis(c.axis, v);
        for (PhasePolicy pol : c.phase_policies)
        {
            std::map<std::string, std::vector<double>> acc;
            std::string error;
            for (int r = 0; r < c.realizations; ++r)
            {
                try
                {
                    Scenario s = build_scenario(cv, static_cast<std::uint64_t>(r), pol);
                    ResourceDecision d;
                    if (cv.resource == "RAPEPA")
                    {
                        CounterRng hr = CounterRng(c.seed).substream(stream::heuristic, static_cast<std::uint64_t>(r));
                        d = rapepa_draws(cv, 1, hr).front();
                    }
                    else
                    {
                        JappaResult jr = jappa(s.ns, s.alpha, s.gains, cv.jappa);
                        if (!jr.feasible)
                            throw std::runtime_error(jr.message);
                        d = jr.decision;
                    }
                    PerformanceReport rep = evaluate(s.ns, s.alpha, s.gains, d);
                    acc["min_se"].push_back(rep.min_se);
                    acc["sum_he"].push_back(rep.energy.sum_harvested);
                }
                catch (const std::exception &ex)
                {
                    if (error.empty())
                        error = "realization " + std::to_string(r) + ": " + ex.what();
                }
            }
            for (const auto &m : metrics)
            {
                SweepRow row{c.axis, v, std::string(to_string(pol)) + "+" + cv.resource, m, 0.0, 0.0, 0, error};
                const auto &xs = acc[m];
                row.seeds = static_cast<int>(xs.size());
                if (!xs.empty())
                {
                    for (double x : xs)
                        row.mean += x;
                    row.mean /= xs.size();
                    double ss = 0.0;
                    for (double x : xs)
                        ss += (x - row.mean) * (x - row.mean);
                    row.std_error = xs.size() > 1 ? std::sqrt(ss / (xs.size() - 1) / xs.size()) : 0.0;
                }
                else
                    row.mean = std::numeric_limits<double>::quiet_NaN();
                rows.push_back(row);
            }
        }
    }
    return rows;
}

// Inter-layer layer count assumed for each element count in the thickness table
inline int assumed_layers(int elements)
{
    static const std::map<int, int> table{{40, 9}, {36, 6}, {32, 7}, {28, 7}};
    auto it = table.find(elements);
    if (it == table.end())
        throw std::invalid_argument("no layer-count assumption for S = " + std::to_string(elements));
    return it->second;
}

struct PassivityRow
{
    int elements = 0, layers = 0;
    double thickness_wl = 0.0;
    double first_norm = 0.0, inter_norm = 0.0;
    bool admissible = false; // inter-layer norm below one
};

inline std::vector<PassivityRow> passivity_table(const std::vector<int> &elements, const std::vector<double> &thickness_wl,
                                                 int antennas, int rows, double wavelength)
{
    std::vector<PassivityRow> out;
    for (int S : elements)
        for (double T : thickness_wl)
        {
            PassivityRow r;
            r.elements = S;
            r.layers = assumed_layers(S);
            r.thickness_wl = T;
            SimGeometry g = SimGeometry::make(S, rows, r.layers, antennas, wavelength, T);
            SimPropagation p = SimPropagation::build(g);
            PassivityReport rep = passivity(g, p);
            r.first_norm = rep.first_norm;
            r.inter_norm = rep.inter_norm;
            r.admissible = rep.inter_norm < 1.0;
            out.push_back(r);
        }
    return out;
}

// CSV output: a "# config_hash=..." comment line, a header, then rows. Numbers use %.17g so
// identical runs give identical bytes.
class CsvWriter
{
  public:
    CsvWriter(const std::string &path, const std::string &config_hash, const std::vector<std::string> &header)
        : f_(path, std::ios::binary)
    {
        if (!f_)
            throw std::runtime_error("cannot write " + path);
        f_ << "# config_hash=" << config_hash << "\n";
        for (std::size_t i = 0; i < header.size(); ++i)
            f_ << (i ? "," : "") << header[i];
        f_ << "\n";
    }

    static std::string num(double v)
    {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    static std::string quote(const std::string &s)
    {
        if (s.find_first_of(",\"\n") == std::string::npos)
            return s;
        std::string q = "\"";
        for (char ch : s)
            q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }

    void row(const std::vector<std::string> &cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
            f_ << (i ? "," : "") << cells[i];
        f_ << "\n";
    }

  private:
    std::ofstream f_;
};

inline void write_sweep_csv(const std::string &path, const std::string &hash, const std::vector<SweepRow> &rows)
{
    CsvWriter w(path, hash, {"axis", "value", "policy", "metric", "mean", "stderr", "seeds", "error"});
    for (const auto &r : rows)
        w.row({r.axis, CsvWriter::num(r.value), r.policy, r.metric, CsvWriter::num(r.mean), CsvWriter::num(r.std_error),
               std::to_string(r.seeds), CsvWriter::quote(r.error)});
}

inline void write_passivity_csv(const std::string &path, const std::string &hash, const std::vector<PassivityRow> &rows)
{
    CsvWriter w(path, hash, {"S", "L", "thickness_wl", "first_norm", "inter_norm", "admissible"});
    for (const auto &r : rows)
        w.row({std::to_string(r.elements), std::to_string(r.layers), CsvWriter::num(r.thickness_wl),
               CsvWriter::num(r.first_norm), CsvWriter::num(r.inter_norm), r.admissible ? "1" : "0"});
}

inline void write_sca_trace_csv(const std::string &path, const std::string &hash, const JappaResult &r)
{
    CsvWriter w(path, hash, {"phase", "n", "objective", "max_residual", "max_binarity", "kkt", "tangency", "accepted"});
    auto emit = [&](const char *phase, const std::vector<ScaTraceEntry> &tr) {
        for (const auto &e : tr)
            w.row({phase, std::to_string(e.iteration), CsvWriter::num(e.objective), CsvWriter::num(e.max_residual),
                   CsvWriter::num(e.max_binarity), CsvWriter::num(e.kkt), CsvWriter::num(e.tangency),
                   e.accepted ? "1" : "0"});
    };
    emit("relaxed", r.trace);
    emit("polish", r.polish);
}

inline void write_learning_csv(const std::string &path, const std::string &hash, const TrainResult &r)
{
    CsvWriter w(path, hash, {"episode", "reward", "mean_sum_he", "critic_loss"});
    for (std::size_t i = 0; i < r.episode_reward.size(); ++i)
        w.row({std::to_string(i), CsvWriter::num(r.episode_reward[i]), CsvWriter::num(r.episode_he[i]),
               CsvWriter::num(r.critic_loss[i])});
}

inline void write_hps_trace_csv(const std::string &path, const std::string &hash, const SimPropagation &prop, int aps,
                                int layers, int C, const CounterRng &rng)
{
    CsvWriter w(path, hash, {"ap", "layer", "best_objective"});
    for (int m = 0; m < aps; ++m)
    {
        HpsResult h = hps_search(prop, layers, C, rng.substream(static_cast<std::uint64_t>(m)));
        for (std::size_t l = 0; l < h.layer_best.size(); ++l)
            w.row({std::to_string(m), std::to_string(l + 1), CsvWriter::num(h.layer_best[l])});
    }
}

} // namespace simswipt
