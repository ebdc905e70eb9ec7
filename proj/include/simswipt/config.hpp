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

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace simswipt
{

// Flat "key = value" configuration with dotted namespaces. Every key has a default;
// setting a key outside the registry is an error.
class Config
{
  public:
    Config() : values_(defaults()) {}

    static const std::map<std::string, std::string> &defaults()
    {
        static const std::map<std::string, std::string> table = {
            {"topology.M", "4"},
            {"topology.K_I", "2"},
            {"topology.K_E", "2"},
            {"topology.area_m", "100"},
            {"topology.ap_height_m", "15"},
            {"topology.rx_height_m", "1.65"},
            {"topology.kappa", "5"},
            {"pathloss.ref_loss_db", "140.7"},
            {"pathloss.d0_m", "10"},
            {"pathloss.d1_m", "50"},
            {"pathloss.far_slope_db", "35"},
            {"pathloss.shadow_db", "8"},
            {"geom.N", "32"},
            {"geom.S", "16"},
            {"geom.rows", "4"},
            {"geom.L", "2"},
            {"geom.wavelength_m", "0.0857"},
            {"geom.thickness_wl", "4"},
            {"geom.spacing_wl", "0.5"},
            {"system.tau_c", "200"},
            {"system.noise_dbm", "-92"},
            {"system.dl_power_w", "1"},
            {"system.ul_power_w", "0.2"},
            {"system.xi", "150"},
            {"system.chi", "0.024"},
            {"system.phi", "0.024"},
            {"system.energy_target_w", "1e-5"},
            {"system.se_target", "0"},
            {"pilot.reuse_info", "0"},
            {"pilot.reuse_energy", "0"},
            {"policy.phase", "HPS"},
            {"policy.resource", "RAPEPA"},
            {"heuristic.candidates", "100"},
            {"heuristic.rapepa_spread", "1"},
            {"heuristic.rapepa_info_aps", "-1"},
            {"jappa.penalty", "10"},
            {"jappa.max_iters", "100"},
            {"jappa.tol", "1e-4"},
            {"jappa.rapepa_draws", "500"},
            {"jappa.qos_fraction", "0.5"},
            {"drl.episodes", "300"},
            {"drl.steps", "50"},
            {"drl.hidden1", "128"},
            {"drl.hidden2", "64"},
            {"drl.actor_lr", "1e-4"},
            {"drl.critic_lr", "5e-3"},
            {"drl.batch", "128"},
            {"drl.discount", "0.99"},
            {"drl.soft_update", "1e-4"},
            {"drl.noise_std", "0.2"},
            {"drl.noise_decay", "1e-4"},
            {"drl.replay", "100000"},
            {"drl.reward_tradeoff", "0.5"},
            {"drl.se_penalty", "0.25"},
            {"drl.grad_clip", "0.5"},
            {"drl.mode", "CTDE"},
            {"drl.se_penalty_mode", "flat"},
            {"drl.qos_fraction", "1"},
            {"drl.baseline_episodes", "30"},
            {"run.seed", "1"},
            {"run.trials", "10000"},
            {"run.alpha_trials", "2000"},
            {"run.realizations", "50"},
            {"sweep.axis", "kappa"},
            {"sweep.values", "2,4,6,8,10,12"},
            {"sweep.policies", "HPS,EQPS,RDPS"},
        };
        return table;
    }

    static Config from_text(std::string_view text, std::string_view origin = "<string>")
    {
        Config cfg;
        std::istringstream in{std::string(text)};
        std::string line;
        int lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            std::string body = trim(line);
            if (body.empty())
                continue;
            auto eq = body.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument(std::string(origin) + ":" + std::to_string(lineno) + ": expected key = value");
            cfg.set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
        }
        return cfg;
    }

    static Config from_file(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw std::invalid_argument("cannot open config file " + path);
        std::stringstream ss;
        ss << f.rdbuf();
        return from_text(ss.str(), path);
    }

    void set(const std::string &key, const std::string &value)
    {
        auto it = values_.find(key);
        if (it == values_.end())
            throw std::invalid_argument("unknown config key '" + key + "'");
        it->second = value;
    }

    const std::string &get(const std::string &key) const
    {
        auto it = values_.find(key);
        if (it == values_.end())
            throw std::invalid_argument("unknown config key '" + key + "'");
        return it->second;
    }

    double get_double(const std::string &key) const
    {
        const std::string &v = get(key);
        try
        {
            std::size_t used = 0;
            double x = std::stod(v, &used);
            if (used != v.size())
                throw std::invalid_argument("trailing characters");
            return x;
        }
        catch (const std::exception &)
        {
            throw std::invalid_argument("config key '" + key + "' expects a number, got '" + v + "'");
        }
    }

    long long get_int(const std::string &key) const
    {
        const std::string &v = get(key);
        long long x = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || ptr != v.data() + v.size())
            throw std::invalid_argument("config key '" + key + "' expects an integer, got '" + v + "'");
        return x;
    }

    std::uint64_t get_u64(const std::string &key) const
    {
        const std::string &v = get(key);
        std::uint64_t x = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || ptr != v.data() + v.size())
            throw std::invalid_argument("config key '" + key + "' expects an unsigned integer, got '" + v + "'");
        return x;
    }

    std::vector<double> get_list(const std::string &key) const
    {
        std::vector<double> out;
        std::stringstream ss(get(key));
        std::string item;
        while (std::getline(ss, item, ','))
        {
            item = trim(item);
            if (item.empty())
                continue;
            try
            {
                out.push_back(std::stod(item));
            }
            catch (const std::exception &)
            {
                throw std::invalid_argument("config key '" + key + "' has a non-numeric entry '" + item + "'");
            }
        }
        return out;
    }

    std::vector<std::string> get_strings(const std::string &key) const
    {
        std::vector<std::string> out;
        std::stringstream ss(get(key));
        std::string item;
        while (std::getline(ss, item, ','))
            if (item = trim(item); !item.empty())
                out.push_back(item);
        return out;
    }

    // Sorted "key = value" lines of every resolved key
    std::string canonical() const
    {
        std::string out;
        for (const auto &[k, v] : values_)
            out += k + " = " + v + "\n";
        return out;
    }

    std::uint64_t hash() const { return fnv1a(canonical()); }

    std::string hash_hex() const
    {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
        return buf;
    }

    static std::uint64_t fnv1a(std::string_view s)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

  private:
    static std::string trim(const std::string &s)
    {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos)
            return {};
        auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> values_;
};

} // namespace simswipt
