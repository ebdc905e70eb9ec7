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

#include "channel.hpp"

#include <functional>
#include <numeric>

namespace simswipt
{

enum class PhasePolicy
{
    rdps,
    eqps,
    hps
};

inline PhasePolicy parse_phase_policy(const std::string &s)
{
    if (s == "RDPS")
        return PhasePolicy::rdps;
    if (s == "EQPS")
        return PhasePolicy::eqps;
    if (s == "HPS")
        return PhasePolicy::hps;
    throw std::invalid_argument("unknown phase policy '" + s + "' (RDPS, EQPS or HPS)");
}

inline const char *to_string(PhasePolicy p)
{
    switch (p)
    {
    case PhasePolicy::rdps: return "RDPS";
    case PhasePolicy::eqps: return "EQPS";
    case PhasePolicy::hps: return "HPS";
    }
    return "?";
}

// Candidate c of one layer; the stream handed in is already specific to (layer, c)
using CandidateSource = std::function<RVec(int candidate, CounterRng &rng, int elements)>;

inline CandidateSource uniform_candidates()
{
    return [](int, CounterRng &rng, int S) {
        RVec v(S);
        for (int s = 0; s < S; ++s)
            v[s] = uniform(rng, 0.0, two_pi);
        return v;
    };
}

// Candidate c enumerates the base-|alphabet| digits of c, so C = |alphabet|^S covers every vector
inline CandidateSource alphabet_candidates(std::vector<double> alphabet)
{
    return [alphabet](int c, CounterRng &, int S) {
        RVec v(S);
        const long long base = static_cast<long long>(alphabet.size());
        long long code = c;
        for (int s = 0; s < S; ++s)
        {
            v[s] = alphabet[static_cast<std::size_t>(code % base)];
            code /= base;
        }
        return v;
    };
}

struct HpsResult
{
    RMat phases;                     // L x S
    std::vector<double> layer_best;  // best tr(FF^H) kept at each layer
    std::vector<std::vector<double>> candidates; // every evaluated objective, per layer
};

// Layer-by-layer search for one AP: layers not yet visited hold their candidate 0
inline HpsResult hps_search(const SimPropagation &prop, int layers, int C, const CounterRng &rng,
                            const CandidateSource &source = uniform_candidates())
{
    if (C < 1)
        throw std::invalid_argument("the heuristic search needs at least one candidate per layer");
    const int S = static_cast<int>(prop.inter.rows());
    auto draw = [&](int l, int c) {
        CounterRng r = rng.substream(static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(c));
        return source(c, r, S);
    };
    HpsResult res;
    res.phases.resize(layers, S);
    for (int l = 0; l < layers; ++l)
        res.phases.row(l) = draw(l, 0).transpose();
    for (int l = 0; l < layers; ++l)
    {
        RMat trial = res.phases;
        double best = -1.0;
        RVec best_row;
        std::vector<double> seen;
        for (int c = 0; c < C; ++c)
        {
            RVec row = draw(l, c);
            trial.row(l) = row.transpose();
            double f = sim_cascade(prop, trial).gram_trace;
            seen.push_back(f);
            if (f > best)
            {
                best = f;
                best_row = row;
            }
        }
        res.phases.row(l) = best_row.transpose();
        res.layer_best.push_back(best);
        res.candidates.push_back(std::move(seen));
    }
    return res;
}

inline RMat eqps(int layers, int elements, double value = 0.0)
{
    return RMat::Constant(layers, elements, value);
}

inline RMat rdps(int layers, int elements, CounterRng &rng)
{
    RMat p(layers, elements);
    for (int l = 0; l < layers; ++l)
        for (int s = 0; s < elements; ++s)
            p(l, s) = uniform(rng, 0.0, two_pi);
    return p;
}

// Phase blocks for all APs under a policy; AP m uses substream m
inline std::vector<RMat> network_phases(PhasePolicy policy, const SimPropagation &prop, int aps, int layers, int C,
                                        const CounterRng &rng)
{
    const int S = static_cast<int>(prop.inter.rows());
    std::vector<RMat> out;
    for (int m = 0; m < aps; ++m)
    {
        CounterRng r = rng.substream(static_cast<std::uint64_t>(m));
        switch (policy)
        {
        case PhasePolicy::eqps: out.push_back(eqps(layers, S)); break;
        case PhasePolicy::rdps: out.push_back(rdps(layers, S, r)); break;
        case PhasePolicy::hps: out.push_back(hps_search(prop, layers, C, r).phases); break;
        }
    }
    return out;
}

// Random AP modes around a reference I-AP count with equal power split inside each group
inline ResourceDecision rapepa(int aps, int info_aps_ref, int spread, int info_rx, int energy_rx, CounterRng &rng)
{
    if (spread < 0 || info_aps_ref < 0 || info_aps_ref > aps)
        throw std::invalid_argument("invalid RAPEPA parameters");
    int lo = std::max(0, info_aps_ref - spread), hi = std::min(aps, info_aps_ref + spread);
    int mi = uniform_int(rng, info_aps_ref - spread, info_aps_ref + spread);
    mi = std::clamp(mi, lo, hi);
    std::vector<int> order(aps);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    ResourceDecision d;
    d.mode = RVec::Zero(aps);
    d.eta_info = RMat::Zero(aps, info_rx);
    d.eta_energy = RMat::Zero(aps, energy_rx);
    for (int i = 0; i < mi; ++i)
        d.mode[order[i]] = 1.0;
    for (int m = 0; m < aps; ++m)
    {
        if (d.mode[m] == 1.0 && info_rx > 0)
            d.eta_info.row(m).setConstant(1.0 / info_rx);
        if (d.mode[m] == 0.0 && energy_rx > 0)
            d.eta_energy.row(m).setConstant(1.0 / energy_rx);
    }
    return d;
}

} // namespace simswipt
