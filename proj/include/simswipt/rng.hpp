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

#include "types.hpp"

#include <cstdint>
#include <limits>
#include <random>

namespace simswipt
{

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based generator: output n is mix64(key + n * gamma). Substreams are new keys
// hashed from (key, id), so any (master, realization, trial) stream is reachable directly.
class CounterRng
{
  public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key = 0) : key_(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(key_ + (++counter_) * golden_gamma); }

    CounterRng substream(std::uint64_t id) const
    {
        return CounterRng(mix64(key_ ^ mix64(id + golden_gamma)) + id);
    }

    template <class... Ids>
    CounterRng substream(std::uint64_t id, Ids... rest) const
    {
        return substream(id).substream(static_cast<std::uint64_t>(rest)...);
    }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Well-known stream tags so unrelated consumers of one master seed never collide.
namespace stream
{
inline constexpr std::uint64_t topology = 1;
inline constexpr std::uint64_t phases = 2;
inline constexpr std::uint64_t channel = 3;
inline constexpr std::uint64_t alpha = 4;
inline constexpr std::uint64_t heuristic = 5;
inline constexpr std::uint64_t baseline = 6;
inline constexpr std::uint64_t learning = 7;
} // namespace stream

inline double uniform01(CounterRng &rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double uniform(CounterRng &rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(CounterRng &rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double standard_normal(CounterRng &rng)
{
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

// CN(0, 1) entries
inline CVec complex_normal(CounterRng &rng, Eigen::Index n)
{
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        double re = nd(rng);
        double im = nd(rng);
        v[i] = cplx(re, im);
    }
    return v;
}

} // namespace simswipt
