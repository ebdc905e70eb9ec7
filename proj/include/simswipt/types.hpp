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

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace simswipt
{

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Raised when a Gram matrix is singular (collinear estimates, N < K_I, ...)
struct RankError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// Radio and harvesting constants. Powers in Watt, rho_* are transmit power over noise power.
struct SystemParams
{
    int coherence_len = 200;                // tau_c
    double noise_power = dbm_to_watt(-92.0); // sigma_n^2 [W]
    double dl_power = 1.0;                   // rho~_d [W]
    double ul_power = 0.2;                   // rho~_u [W]
    double xi = 150.0;                       // logistic steepness
    double chi = 0.024;                      // logistic midpoint [W]
    double phi = 0.024;                      // saturation DC power [W]
    double energy_target = 1.0e-5;           // Gamma [W], per ER
    double se_target = 0.0;                  // S_ki [bit/s/Hz], per IR

    double rho_d() const { return dl_power / noise_power; }
    double rho_u() const { return ul_power / noise_power; }
    double omega() const { return 1.0 / (1.0 + std::exp(xi * chi)); }

    void validate(int pilot_len) const
    {
        if (pilot_len >= coherence_len)
            throw std::invalid_argument("pilot length must be shorter than the coherence interval");
        if (!(xi > 0.0) || !(phi > 0.0) || !(noise_power > 0.0))
            throw std::invalid_argument("xi, phi and noise power must be positive");
    }
};

// AP mode a_m (1 = information, 0 = energy), per-AP power shares and SIM phases (one L x S block per AP)
struct ResourceDecision
{
    RVec mode;              // M
    RMat eta_info;          // M x K_I
    RMat eta_energy;        // M x K_E
    std::vector<RMat> phases; // M blocks of L x S, radians
};

} // namespace simswipt
