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

#include "mlp.hpp"
#include "performance.hpp"
#include "topology.hpp"

#include <deque>
#include <sstream>

namespace simswipt
{

// Running extrema with min-max normalisation; a degenerate range maps to the neutral 0.5
class RunningRange
{
  public:
    void clear()
    {
        lo_ = std::numeric_limits<double>::infinity();
        hi_ = -std::numeric_limits<double>::infinity();
    }
    void update(double x)
    {
        lo_ = std::min(lo_, x);
        hi_ = std::max(hi_, x);
    }
    double normalize(double x) const
    {
        if (!(hi_ - lo_ >= 1e-12))
            return 0.5;
        return std::clamp((x - lo_) / (hi_ - lo_), 0.0, 1.0);
    }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

  private:
    double lo_ = std::numeric_limits<double>::infinity();
    double hi_ = -std::numeric_limits<double>::infinity();
};

enum class SePenalty
{
    flat,        // full penalty when any IR misses its target
    proportional // penalty times the fraction of IRs missing their target
};

struct RewardOptions
{
    double tradeoff = 0.5;   // weight of the HE increment against the SIM gain term
    double se_penalty = 0.25;
    SePenalty penalty_mode = SePenalty::flat;
};

class RewardTracker
{
  public:
    explicit RewardTracker(RewardOptions opt = {}) : opt_(opt) {}

    void clear()
    {
        he_.clear();
        gain_.clear();
    }

    struct Output
    {
        double reward = 0.0, he_norm = 0.5, gain_norm = 0.5, penalty = 0.0;
    };

    // Updates the extrema first, then normalises. violation is the fraction of IRs below target.
    Output reward(double delta_he, double sim_gain, double violation)
    {
        he_.update(delta_he);
        gain_.update(sim_gain);
        Output o;
        o.he_norm = he_.normalize(delta_he);
        o.gain_norm = gain_.normalize(sim_gain);
        if (violation > 0.0)
            o.penalty = opt_.penalty_mode == SePenalty::flat ? opt_.se_penalty : opt_.se_penalty * violation;
        o.reward = opt_.tradeoff * o.he_norm + (1.0 - opt_.tradeoff) * o.gain_norm - o.penalty;
        return o;
    }

    const RunningRange &he_range() const { return he_; }
    const RunningRange &gain_range() const { return gain_; }
    const RewardOptions &options() const { return opt_; }

  private:
    RewardOptions opt_;
    RunningRange he_, gain_;
};

struct NormalizedAction
{
    double mode = 0.0;
    RVec eta_info, eta_energy;
    RMat phases; // L x S in [0, 2 pi]
};

// Softmax whose entries sum to exactly one when added left to right
inline RVec exact_softmax(const RVec &z)
{
    const Eigen::Index n = z.size();
    if (n == 0)
        return RVec();
    RVec p = (z.array() - z.maxCoeff()).exp();
    p /= p.sum();
    double head = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        head += p[i];
    p[n - 1] = 1.0 - head;
    for (int fix = 0; fix < 4; ++fix)
    {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            s += p[i];
        if (s == 1.0)
            break;
        p[n - 1] += 1.0 - s;
    }
    return p;
}

inline NormalizedAction normalize_action(const RVec &raw, int info_rx, int energy_rx, int layers, int elements)
{
    const Eigen::Index need = 1 + info_rx + energy_rx + static_cast<Eigen::Index>(layers) * elements;
    if (raw.size() != need)
        throw std::invalid_argument("raw action has the wrong dimension");
    NormalizedAction a;
    a.mode = raw[0] >= 0.5 ? 1.0 : 0.0;
    a.eta_info = exact_softmax(raw.segment(1, info_rx));
    a.eta_energy = exact_softmax(raw.segment(1 + info_rx, energy_rx));
    a.phases.resize(layers, elements);
    for (int l = 0; l < layers; ++l)
        for (int s = 0; s < elements; ++s)
            a.phases(l, s) = two_pi * std::clamp(raw[1 + info_rx + energy_rx + l * elements + s], 0.0, 1.0);
    return a;
}

inline bool action_valid(const NormalizedAction &a)
{
    if (a.mode != 0.0 && a.mode != 1.0)
        return false;
    for (const RVec *v : {&a.eta_info, &a.eta_energy})
    {
        if (v->size() == 0)
            continue;
        double s = 0.0;
        for (Eigen::Index i = 0; i < v->size(); ++i)
        {
            if ((*v)[i] < 0.0)
                return false;
            s += (*v)[i];
        }
        if (s != 1.0)
            return false;
    }
    return (a.phases.array() >= 0.0).all() && (a.phases.array() <= two_pi).all();
}

struct StepResult
{
    std::vector<RVec> observations;
    double reward = 0.0;
    RewardTracker::Output parts;
    double sum_he = 0.0;
    double delta_he = 0.0;
    double sim_gain = 0.0; // sum of ||F_m||_F
    RVec se;
    double violation = 0.0;
    bool actions_valid = true;
};

// Markovian SWIPT environment on a fixed topology. Each agent is one AP and controls its mode,
// power split and SIM phases; rewards come from the closed-form performance model.
class SwiptEnv
{
  public:
    SwiptEnv(Topology topo, const SimGeometry &geom, PilotPlan plan, SystemParams sys, RewardOptions reward = {})
        : topo_(std::move(topo)), geom_(geom), prop_(SimPropagation::build(geom)), plan_(std::move(plan)), sys_(sys),
          tracker_(reward)
    {
        sys_.validate(plan_.length);
    }

    int agents() const { return topo_.aps; }
    int observation_dim() const { return 1 + topo_.receivers(); }
    int action_dim() const { return 1 + topo_.receivers() + geom_.layers * geom_.elements; }
    const Topology &topology() const { return topo_; }
    const SimGeometry &geometry() const { return geom_; }
    const SystemParams &system() const { return sys_; }
    const RewardTracker &tracker() const { return tracker_; }

    std::vector<RVec> reset()
    {
        prev_he_ = 0.0;
        tracker_.clear();
        return observations();
    }

    std::vector<RVec> observations() const
    {
        std::vector<RVec> obs;
        for (int m = 0; m < topo_.aps; ++m)
        {
            RVec o(observation_dim());
            o[0] = prev_he_;
            o.tail(topo_.receivers()) = topo_.beta.row(m).transpose();
            obs.push_back(o);
        }
        return obs;
    }

    NormalizedAction normalize(const RVec &raw) const
    {
        return normalize_action(raw, topo_.info_rx, topo_.energy_rx, geom_.layers, geom_.elements);
    }

    StepResult step(const std::vector<RVec> &raw)
    {
        if (static_cast<int>(raw.size()) != topo_.aps)
            throw std::invalid_argument("one raw action per agent expected");
        StepResult r;
        std::vector<CMat> F;
        ResourceDecision d;
        d.mode.resize(topo_.aps);
        d.eta_info.resize(topo_.aps, topo_.info_rx);
        d.eta_energy.resize(topo_.aps, topo_.energy_rx);
        for (int m = 0; m < topo_.aps; ++m)
        {
            NormalizedAction a = normalize(raw[m]);
            r.actions_valid = r.actions_valid && action_valid(a);
            Cascade c = sim_cascade(prop_, a.phases);
            r.sim_gain += std::sqrt(c.gram_trace);
            F.push_back(c.F);
            d.mode[m] = a.mode;
            d.eta_info.row(m) = a.mode * a.eta_info.transpose();
            d.eta_energy.row(m) = (1.0 - a.mode) * a.eta_energy.transpose();
            d.phases.push_back(a.phases);
        }
        NetworkStatistics ns = network_statistics(topo_, F, plan_, sys_);
        Normalization alpha = alpha_approx(ns);
        GainTables gains = closed_form_gains(ns);
        PerformanceReport rep = evaluate(ns, alpha, gains, d);
        r.sum_he = rep.energy.sum_harvested;
        r.se = rep.info.se;
        r.delta_he = r.sum_he - prev_he_;
        int missed = 0;
        if (sys_.se_target > 0.0)
            for (int k = 0; k < topo_.info_rx; ++k)
                missed += r.se[k] < sys_.se_target;
        r.violation = topo_.info_rx ? static_cast<double>(missed) / topo_.info_rx : 0.0;
        r.parts = tracker_.reward(r.delta_he, r.sim_gain, r.violation);
        r.reward = r.parts.reward;
        if (!std::isfinite(r.reward))
            throw NumericError("non-finite reward");
        prev_he_ = r.sum_he;
        r.observations = observations();
        return r;
    }

  private:
    Topology topo_;
    SimGeometry geom_;
    SimPropagation prop_;
    PilotPlan plan_;
    SystemParams sys_;
    RewardTracker tracker_;
    double prev_he_ = 0.0;
};

// Network input features: powers and gains span many decades, so they enter on a log scale
inline RVec observation_features(const RVec &obs)
{
    RVec f(obs.size());
    for (Eigen::Index i = 0; i < obs.size(); ++i)
        f[i] = (std::log10(std::max(obs[i], 1e-30)) + 10.0) / 5.0;
    return f;
}

enum class TrainMode
{
    ctde,
    ctce
};

inline TrainMode parse_train_mode(const std::string &s)
{
    if (s == "CTDE" || s == "ctde")
        return TrainMode::ctde;
    if (s == "CTCE" || s == "ctce")
        return TrainMode::ctce;
    throw std::invalid_argument("unknown training mode: " + s);
}

struct DrlHyper
{
    TrainMode mode = TrainMode::ctde;
    int episodes = 300;
    int steps = 50;
    std::vector<int> hidden{128, 64};
    double actor_lr = 1e-4;
    double critic_lr = 5e-3;
    int batch = 128;
    double discount = 0.99;
    double soft_update = 1e-4;
    double noise_std = 0.2;
    double noise_decay = 1e-4; // per episode, multiplicative
    std::size_t replay = 100000;
    double grad_clip = 0.5;
};

struct DivergenceError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct TrainResult
{
    std::vector<double> episode_reward; // accumulated per episode
    std::vector<double> episode_he;     // mean sum-HE per episode [W]
    std::vector<double> critic_loss;    // mean per episode
    std::vector<Mlp> actors;            // M for CTDE, one for CTCE
    Mlp critic;
    std::size_t actions_applied = 0, actions_valid = 0;
    double reward_min = std::numeric_limits<double>::infinity();
    double reward_max = -std::numeric_limits<double>::infinity();
};

namespace detail
{

struct Transition
{
    RVec state, action, next_state;
    double reward = 0.0;
};

class Replay
{
  public:
    explicit Replay(std::size_t capacity) : cap_(capacity) {}
    void push(Transition t)
    {
        if (buf_.size() < cap_)
            buf_.push_back(std::move(t));
        else
            buf_[head_] = std::move(t);
        head_ = (head_ + 1) % cap_;
    }
    std::size_t size() const { return buf_.size(); }
    const Transition &operator[](std::size_t i) const { return buf_[i]; }

  private:
    std::size_t cap_, head_ = 0;
    std::vector<Transition> buf_;
};

inline RVec stack(const std::vector<RVec> &parts)
{
    Eigen::Index n = 0;
    for (const auto &p : parts)
        n += p.size();
    RVec v(n);
    n = 0;
    for (const auto &p : parts)
    {
        v.segment(n, p.size()) = p;
        n += p.size();
    }
    return v;
}

} // namespace detail

// Off-policy actor-critic with a centralised critic on (global state, joint action).
// CTDE: one actor per AP on its local observation. CTCE: one actor on the global state.
class ActorCriticTrainer
{
  public:
    ActorCriticTrainer(SwiptEnv &env, DrlHyper hyper, CounterRng rng)
        : env_(env), hp_(std::move(hyper)), rng_(rng), replay_(std::max<std::size_t>(hp_.replay, 1))
    {
        const int M = env_.agents(), O = env_.observation_dim(), A = env_.action_dim();
        auto sizes = [&](int in, int out) {
            std::vector<int> s{in};
            s.insert(s.end(), hp_.hidden.begin(), hp_.hidden.end());
            s.push_back(out);
            return s;
        };
        CounterRng init = rng_.substream(1);
        if (hp_.mode == TrainMode::ctde)
            for (int m = 0; m < M; ++m)
                actors_.emplace_back(sizes(O, A), OutputActivation::unit_tanh);
        else
            actors_.emplace_back(sizes(M * O, M * A), OutputActivation::unit_tanh);
        for (auto &a : actors_)
            a.initialize(init);
        critic_ = Mlp(sizes(M * O + M * A, 1), OutputActivation::linear);
        critic_.initialize(init);
        target_actors_ = actors_;
        target_critic_ = critic_;
        for (const auto &a : actors_)
            actor_opt_.emplace_back(a, hp_.actor_lr);
        critic_opt_ = Adam(critic_, hp_.critic_lr);
    }

    const std::vector<Mlp> &actors() const { return actors_; }
    const Mlp &critic() const { return critic_; }

    // Deterministic policy, raw actions in [0, 1]
    std::vector<RVec> act(const std::vector<RVec> &obs) const
    {
        const int M = env_.agents(), A = env_.action_dim();
        std::vector<RVec> out;
        if (hp_.mode == TrainMode::ctde)
            for (int m = 0; m < M; ++m)
                out.push_back(actors_[m].infer(observation_features(obs[m])));
        else
        {
            RVec joint = actors_[0].infer(global_state(obs));
            for (int m = 0; m < M; ++m)
                out.push_back(joint.segment(m * A, A));
        }
        return out;
    }

    TrainResult train()
    {
        TrainResult res;
        CounterRng noise_rng = rng_.substream(2), sample_rng = rng_.substream(3);
        for (int ep = 0; ep < hp_.episodes; ++ep)
        {
            const double sigma = hp_.noise_std * std::pow(1.0 - hp_.noise_decay, ep);
            std::vector<RVec> obs = env_.reset();
            double total = 0.0, he = 0.0, loss = 0.0;
            int updates = 0;
            for (int t = 0; t < hp_.steps; ++t)
            {
                std::vector<RVec> raw = act(obs);
                for (auto &a : raw)
                    for (Eigen::Index i = 0; i < a.size(); ++i)
                        a[i] = std::clamp(a[i] + sigma * standard_normal(noise_rng), 0.0, 1.0);
                StepResult sr = env_.step(raw);
                ++res.actions_applied;
                res.actions_valid += sr.actions_valid;
                res.reward_min = std::min(res.reward_min, sr.reward);
                res.reward_max = std::max(res.reward_max, sr.reward);
                total += sr.reward;
                he += sr.sum_he;
                replay_.push({global_state(obs), detail::stack(raw), global_state(sr.observations), sr.reward});
                obs = sr.observations;
                if (replay_.size() >= static_cast<std::size_t>(hp_.batch))
                {
                    double l = update(sample_rng);
                    if (!std::isfinite(l) || l > 1e6)
                        throw DivergenceError(dump(ep, t, l));
                    loss += l;
                    ++updates;
                }
            }
            if (!std::isfinite(total))
                throw DivergenceError(dump(ep, hp_.steps, total));
            res.episode_reward.push_back(total);
            res.episode_he.push_back(he / hp_.steps);
            res.critic_loss.push_back(updates ? loss / updates : 0.0);
        }
        res.actors = actors_;
        res.critic = critic_;
        return res;
    }

  private:
    RVec global_state(const std::vector<RVec> &obs) const
    {
        std::vector<RVec> f;
        for (const auto &o : obs)
            f.push_back(observation_features(o));
        return detail::stack(f);
    }

    // One critic step and one step per actor; returns the critic loss
    double update(CounterRng &rng)
    {
        const int M = env_.agents(), O = env_.observation_dim(), A = env_.action_dim();
        const int B = hp_.batch;
        const int SD = M * O, AD = M * A;
        RMat S(SD, B), Act(AD, B), S2(SD, B), R(1, B);
        for (int b = 0; b < B; ++b)
        {
            const auto &tr = replay_[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(replay_.size()) - 1))];
            S.col(b) = tr.state;
            Act.col(b) = tr.action;
            S2.col(b) = tr.next_state;
            R(0, b) = tr.reward;
        }
        // critic target
        RMat A2(AD, B);
        if (hp_.mode == TrainMode::ctde)
            for (int m = 0; m < M; ++m)
                A2.middleRows(m * A, A) = target_actors_[m].forward(S2.middleRows(m * O, O));
        else
            A2 = target_actors_[0].forward(S2);
        RMat in2(SD + AD, B);
        in2 << S2, A2;
        RMat y = R + hp_.discount * target_critic_.forward(in2);

        RMat in(SD + AD, B);
        in << S, Act;
        Mlp::Cache cc;
        RMat q = critic_.forward(in, cc);
        RMat diff = q - y;
        const double loss = diff.squaredNorm() / B;
        if (!std::isfinite(loss) || loss > 1e6)
            return loss;
        MlpParams gc = critic_.backward(cc, 2.0 * diff / B);
        clip_gradient(gc, hp_.grad_clip);
        critic_opt_.step(critic_, gc);

        // actors ascend the critic
        auto actor_step = [&](std::size_t idx, const RMat &input, int row0, int rows) {
            Mlp::Cache ac;
            RMat a = actors_[idx].forward(input, ac);
            RMat joint = Act;
            joint.middleRows(row0, rows) = a;
            RMat qin(SD + AD, B);
            qin << S, joint;
            Mlp::Cache qc;
            critic_.forward(qin, qc);
            RMat gin;
            critic_.backward(qc, RMat::Constant(1, B, -1.0 / B), &gin);
            MlpParams ga = actors_[idx].backward(ac, gin.middleRows(SD + row0, rows));
            clip_gradient(ga, hp_.grad_clip);
            actor_opt_[idx].step(actors_[idx], ga);
        };
        if (hp_.mode == TrainMode::ctde)
            for (int m = 0; m < M; ++m)
                actor_step(static_cast<std::size_t>(m), S.middleRows(m * O, O), m * A, A);
        else
            actor_step(0, S, 0, AD);

        for (std::size_t i = 0; i < actors_.size(); ++i)
            target_actors_[i].soft_update(actors_[i], hp_.soft_update);
        target_critic_.soft_update(critic_, hp_.soft_update);
        return loss;
    }

    std::string dump(int episode, int step, double value) const
    {
        std::ostringstream os;
        os << "training diverged at episode " << episode << " step " << step << " (value " << value
           << "); replay size " << replay_.size() << ", critic parameter norm "
           << std::sqrt(critic_.params().squared_norm());
        for (std::size_t i = 0; i < actors_.size(); ++i)
            os << ", actor " << i << " norm " << std::sqrt(actors_[i].params().squared_norm());
        return os.str();
    }

    SwiptEnv &env_;
    DrlHyper hp_;
    CounterRng rng_;
    detail::Replay replay_;
    std::vector<Mlp> actors_, target_actors_;
    Mlp critic_, target_critic_;
    std::vector<Adam> actor_opt_;
    Adam critic_opt_;
};

// Accumulated reward per episode under uniformly random raw actions
inline std::vector<double> random_policy_rewards(SwiptEnv &env, int episodes, int steps, CounterRng rng)
{
    std::vector<double> out;
    for (int ep = 0; ep < episodes; ++ep)
    {
        env.reset();
        double total = 0.0;
        for (int t = 0; t < steps; ++t)
        {
            std::vector<RVec> raw;
            for (int m = 0; m < env.agents(); ++m)
            {
                RVec a(env.action_dim());
                for (Eigen::Index i = 0; i < a.size(); ++i)
                    a[i] = uniform01(rng);
                raw.push_back(a);
            }
            total += env.step(raw).reward;
        }
        out.push_back(total);
    }
    return out;
}

} // namespace simswipt
