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

#include <sstream>

using namespace simswipt;
using Catch::Approx;

namespace
{

SwiptEnv tiny_env(double se_target = 0.0)
{
    ExperimentConfig c = validation::drl_config(1);
    c.sys.se_target = se_target;
    CounterRng rng = CounterRng(c.seed).substream(stream::topology, 0);
    Topology topo = generate_topology(c.topology, c.geometry(), rng);
    return SwiptEnv(topo, c.geometry(), c.pilots(), c.sys, c.reward);
}

std::vector<RVec> constant_actions(const SwiptEnv &env, double mode, double fill)
{
    std::vector<RVec> raw;
    for (int m = 0; m < env.agents(); ++m)
    {
        RVec a = RVec::Constant(env.action_dim(), fill);
        a[0] = mode;
        raw.push_back(a);
    }
    return raw;
}

} // namespace

TEST_CASE("zero-weight network outputs its bias")
{
    Mlp net({3, 5, 2}, OutputActivation::linear);
    net.params().biases.back() << 0.25, -1.5;
    RVec y = net.infer(RVec::Constant(3, 4.0));
    CHECK(y[0] == 0.25);
    CHECK(y[1] == -1.5);
    Mlp sq({3, 2}, OutputActivation::unit_tanh);
    CHECK(sq.infer(RVec::Ones(3))[0] == Approx(0.5));
}

TEST_CASE("backpropagation matches finite differences")
{
    CHECK(validation::mlp_gradient_error(3) < 1e-4);
}

TEST_CASE("gradient clipping bounds the global norm")
{
    Mlp net({4, 8, 2}, OutputActivation::linear);
    CounterRng rng(1);
    net.initialize(rng);
    MlpParams g = net.params();
    g.scale(100.0);
    double before = clip_gradient(g, 0.5);
    CHECK(before > 0.5);
    CHECK(std::sqrt(g.squared_norm()) <= 0.5 + 1e-9);
    MlpParams small = net.params();
    small.scale(1e-6);
    double n0 = std::sqrt(small.squared_norm());
    clip_gradient(small, 0.5);
    CHECK(std::sqrt(small.squared_norm()) == Approx(n0));
}

TEST_CASE("network save and load round trip")
{
    Mlp net({3, 7, 4, 2}, OutputActivation::unit_tanh);
    CounterRng rng(6);
    net.initialize(rng);
    std::stringstream ss;
    net.save(ss);
    Mlp back = Mlp::load(ss);
    CHECK(back.sizes() == net.sizes());
    CHECK(back.output_activation() == net.output_activation());
    RVec x(3);
    x << 0.1, -0.4, 0.9;
    CHECK(back.infer(x) == net.infer(x));
    std::stringstream junk("NOTANET0");
    CHECK_THROWS(Mlp::load(junk));
}

TEST_CASE("Adam with zero learning rate is a no-op and rejects NaN")
{
    Mlp net({2, 3, 1}, OutputActivation::linear);
    CounterRng rng(2);
    net.initialize(rng);
    Mlp copy = net;
    Adam opt(net, 0.0);
    MlpParams g = net.params();
    opt.step(net, g);
    CHECK(net.params().weights[0] == copy.params().weights[0]);
    g.weights[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(opt.step(net, g), NumericError);
}

TEST_CASE("running range normalisation")
{
    RunningRange r;
    r.update(2.0);
    CHECK(r.normalize(2.0) == 0.5);
    r.update(6.0);
    CHECK(r.normalize(6.0) == 1.0);
    CHECK(r.normalize(4.0) == 0.5);
    CHECK(r.normalize(100.0) == 1.0);
    CHECK(r.normalize(-100.0) == 0.0);
}

TEST_CASE("reward terms follow the weighted formula")
{
    RewardOptions o;
    RewardTracker t(o);
    auto first = t.reward(3.0, 1.0, 0.0);
    CHECK(first.he_norm == 0.5);
    CHECK(first.gain_norm == 0.5);
    CHECK(first.reward == Approx(0.5));
    auto top = t.reward(5.0, 0.5, 0.5);
    CHECK(top.he_norm == 1.0);
    CHECK(top.gain_norm == 0.0);
    CHECK(top.reward == Approx(o.tradeoff * 1.0 - o.se_penalty));
    RewardTracker p({0.5, 0.2, SePenalty::proportional});
    CHECK(p.reward(1.0, 1.0, 0.5).penalty == Approx(0.1));
}

TEST_CASE("softmax and action normalisation")
{
    RVec u = exact_softmax(RVec::Constant(3, 0.37));
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
    {
        s += u[i];
        CHECK(u[i] == Approx(1.0 / 3));
    }
    CHECK(s == 1.0);
    RVec z(4);
    z << 0.1, 0.7, 0.3, 0.9;
    CHECK((exact_softmax(z) - exact_softmax((z.array() + 5.0).matrix())).cwiseAbs().maxCoeff() < 1e-15);

    RVec raw = RVec::Constant(1 + 2 + 4, 0.3);
    raw[0] = 0.7;
    NormalizedAction a = normalize_action(raw, 1, 1, 1, 4);
    CHECK(a.mode == 1.0);
    CHECK(action_valid(a));
    raw[0] = 0.49;
    CHECK(normalize_action(raw, 1, 1, 1, 4).mode == 0.0);
    CHECK_THROWS_AS(normalize_action(RVec::Zero(3), 1, 1, 1, 4), std::invalid_argument);
}

TEST_CASE("environment observations and reset")
{
    SwiptEnv env = tiny_env();
    auto o1 = env.reset();
    REQUIRE(o1.size() == 3);
    for (const auto &o : o1)
    {
        CHECK(o.size() == 1 + 2);
        CHECK(o[0] == 0.0);
    }
    env.step(constant_actions(env, 0.0, 0.4));
    auto o2 = env.reset();
    for (int m = 0; m < 3; ++m)
        CHECK(o1[m] == o2[m]);
    CHECK(env.action_dim() == 1 + 2 + 1 * 4);
}

TEST_CASE("repeated actions give a zero energy increment")
{
    SwiptEnv env = tiny_env();
    env.reset();
    auto raw = constant_actions(env, 0.0, 0.4);
    StepResult a = env.step(raw);
    StepResult b = env.step(raw);
    CHECK(a.delta_he == a.sum_he);
    CHECK(b.delta_he == 0.0);
    CHECK(a.parts.he_norm == 0.5);
    CHECK(a.parts.gain_norm == 0.5);
}

TEST_CASE("all energy mode triggers the SE penalty")
{
    SwiptEnv env = tiny_env(0.5);
    env.reset();
    StepResult r = env.step(constant_actions(env, 0.0, 0.4));
    CHECK(r.se.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.violation == 1.0);
    CHECK(r.parts.penalty == env.tracker().options().se_penalty);
}

TEST_CASE("logged steps replay to the same reward")
{
    SwiptEnv env = tiny_env(0.1);
    env.reset();
    RewardTracker replay(env.tracker().options());
    CounterRng rng(9);
    for (int t = 0; t < 6; ++t)
    {
        std::vector<RVec> raw;
        for (int m = 0; m < env.agents(); ++m)
        {
            RVec a(env.action_dim());
            for (Eigen::Index i = 0; i < a.size(); ++i)
                a[i] = uniform01(rng);
            raw.push_back(a);
        }
        StepResult r = env.step(raw);
        auto o = replay.reward(r.delta_he, r.sim_gain, r.violation);
        const RewardOptions &opt = env.tracker().options();
        double hand = opt.tradeoff * o.he_norm + (1 - opt.tradeoff) * o.gain_norm - (r.violation > 0 ? opt.se_penalty : 0.0);
        CHECK(r.reward == Approx(hand).margin(1e-15));
        CHECK(o.he_norm >= 0.0);
        CHECK(o.he_norm <= 1.0);
    }
}

TEST_CASE("centralised actor covers the joint action space")
{
    SwiptEnv env = tiny_env();
    DrlHyper h;
    h.mode = TrainMode::ctce;
    h.hidden = {8, 8};
    ActorCriticTrainer ce(env, h, CounterRng(1));
    REQUIRE(ce.actors().size() == 1);
    CHECK(ce.actors()[0].outputs() == 3 * (1 * 4 + 2 + 1));
    h.mode = TrainMode::ctde;
    ActorCriticTrainer de(env, h, CounterRng(1));
    CHECK(de.actors().size() == 3);
    CHECK(de.actors()[0].parameter_count() < ce.actors()[0].parameter_count());
    CHECK(parse_train_mode("CTCE") == TrainMode::ctce);
    CHECK_THROWS_AS(parse_train_mode("other"), std::invalid_argument);
}

TEST_CASE("zero learning rates leave the policies unchanged")
{
    SwiptEnv env = tiny_env();
    DrlHyper h;
    h.episodes = 3;
    h.steps = 10;
    h.batch = 8;
    h.hidden = {8, 8};
    h.actor_lr = 0.0;
    h.critic_lr = 0.0;
    ActorCriticTrainer tr(env, h, CounterRng(4));
    std::vector<Mlp> before = tr.actors();
    TrainResult r = tr.train();
    for (std::size_t i = 0; i < before.size(); ++i)
        for (std::size_t l = 0; l < before[i].params().weights.size(); ++l)
            CHECK(r.actors[i].params().weights[l] == before[i].params().weights[l]);
    CHECK(r.actions_valid == r.actions_applied);
    CHECK(r.episode_reward.size() == 3);
}
