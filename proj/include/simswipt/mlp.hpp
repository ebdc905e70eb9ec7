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

#include "rng.hpp"
#include "types.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace simswipt
{

enum class OutputActivation : std::uint8_t
{
    linear = 0,
    unit_tanh = 1 // (tanh + 1) / 2, range [0, 1]
};

struct NumericError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// Gradients (or Adam moments) with the same shapes as the network parameters
struct MlpParams
{
    std::vector<RMat> weights;
    std::vector<RVec> biases;

    double squared_norm() const
    {
        double s = 0.0;
        for (const auto &w : weights)
            s += w.squaredNorm();
        for (const auto &b : biases)
            s += b.squaredNorm();
        return s;
    }
    void scale(double f)
    {
        for (auto &w : weights)
            w *= f;
        for (auto &b : biases)
            b *= f;
    }
    bool finite() const
    {
        for (const auto &w : weights)
            if (!w.allFinite())
                return false;
        for (const auto &b : biases)
            if (!b.allFinite())
                return false;
        return true;
    }
};

// Fully connected network with ReLU hidden layers. Batches are column-major: one sample per column.
class Mlp
{
  public:
    Mlp() = default;
    Mlp(std::vector<int> sizes, OutputActivation out) : sizes_(std::move(sizes)), out_(out)
    {
        if (sizes_.size() < 2)
            throw std::invalid_argument("network needs input and output sizes");
        for (int s : sizes_)
            if (s < 1)
                throw std::invalid_argument("layer sizes must be positive");
        for (std::size_t l = 0; l + 1 < sizes_.size(); ++l)
        {
            p_.weights.push_back(RMat::Zero(sizes_[l + 1], sizes_[l]));
            p_.biases.push_back(RVec::Zero(sizes_[l + 1]));
        }
    }

    // He-uniform weights, zero biases
    void initialize(CounterRng &rng)
    {
        for (std::size_t l = 0; l < p_.weights.size(); ++l)
        {
            const double lim = std::sqrt(6.0 / sizes_[l]);
            for (Eigen::Index j = 0; j < p_.weights[l].cols(); ++j)
                for (Eigen::Index i = 0; i < p_.weights[l].rows(); ++i)
                    p_.weights[l](i, j) = uniform(rng, -lim, lim);
            p_.biases[l].setZero();
        }
    }

    const std::vector<int> &sizes() const { return sizes_; }
    int inputs() const { return sizes_.front(); }
    int outputs() const { return sizes_.back(); }
    OutputActivation output_activation() const { return out_; }
    MlpParams &params() { return p_; }
    const MlpParams &params() const { return p_; }

    std::size_t parameter_count() const
    {
        std::size_t n = 0;
        for (std::size_t l = 0; l < p_.weights.size(); ++l)
            n += static_cast<std::size_t>(p_.weights[l].size() + p_.biases[l].size());
        return n;
    }

    RMat forward(const RMat &x) const
    {
        Cache c;
        return forward(x, c);
    }

    RVec infer(const RVec &x) const { return forward(RMat(x)).col(0); }

    struct Cache
    {
        std::vector<RMat> inputs; // input to each layer
        std::vector<RMat> pre;    // pre-activations
        RMat output;
    };

    RMat forward(const RMat &x, Cache &c) const
    {
        if (x.rows() != inputs())
            throw std::invalid_argument("input size mismatch");
        c.inputs.clear();
        c.pre.clear();
        RMat h = x;
        const std::size_t n = p_.weights.size();
        for (std::size_t l = 0; l < n; ++l)
        {
            c.inputs.push_back(h);
            RMat z = (p_.weights[l] * h).colwise() + p_.biases[l];
            c.pre.push_back(z);
            if (l + 1 < n)
                h = z.cwiseMax(0.0);
            else if (out_ == OutputActivation::unit_tanh)
                h = (z.array().tanh() + 1.0) * 0.5;
            else
                h = z;
        }
        c.output = h;
        return h;
    }

    // Backpropagates d(loss)/d(output); returns parameter gradients and optionally d(loss)/d(input)
    MlpParams backward(const Cache &c, const RMat &grad_out, RMat *grad_in = nullptr) const
    {
        const std::size_t n = p_.weights.size();
        MlpParams g;
        g.weights.resize(n);
        g.biases.resize(n);
        RMat delta = grad_out;
        if (out_ == OutputActivation::unit_tanh)
            delta.array() *= 0.5 * (1.0 - c.pre[n - 1].array().tanh().square());
        for (std::size_t l = n; l-- > 0;)
        {
            g.weights[l] = delta * c.inputs[l].transpose();
            g.biases[l] = delta.rowwise().sum();
            RMat back = p_.weights[l].transpose() * delta;
            if (l > 0)
                delta = back.array() * (c.pre[l - 1].array() > 0.0).cast<double>();
            else if (grad_in)
                *grad_in = back;
        }
        return g;
    }

    void soft_update(const Mlp &src, double tau)
    {
        for (std::size_t l = 0; l < p_.weights.size(); ++l)
        {
            p_.weights[l] = (1.0 - tau) * p_.weights[l] + tau * src.p_.weights[l];
            p_.biases[l] = (1.0 - tau) * p_.biases[l] + tau * src.p_.biases[l];
        }
    }

    // Binary layout: 8-byte magic, uint32 layer count, uint32 sizes, uint8 output activation,
    // then per layer the weight matrix row-major followed by the bias, all float64 little-endian
    void save(std::ostream &os) const
    {
        os.write(magic, 8);
        auto put32 = [&](std::uint32_t v) { os.write(reinterpret_cast<const char *>(&v), 4); };
        put32(static_cast<std::uint32_t>(sizes_.size()));
        for (int s : sizes_)
            put32(static_cast<std::uint32_t>(s));
        const std::uint8_t act = static_cast<std::uint8_t>(out_);
        os.write(reinterpret_cast<const char *>(&act), 1);
        for (std::size_t l = 0; l < p_.weights.size(); ++l)
        {
            for (Eigen::Index i = 0; i < p_.weights[l].rows(); ++i)
                for (Eigen::Index j = 0; j < p_.weights[l].cols(); ++j)
                {
                    double v = p_.weights[l](i, j);
                    os.write(reinterpret_cast<const char *>(&v), 8);
                }
            for (Eigen::Index i = 0; i < p_.biases[l].size(); ++i)
            {
                double v = p_.biases[l][i];
                os.write(reinterpret_cast<const char *>(&v), 8);
            }
        }
        if (!os)
            throw std::runtime_error("failed to write network");
    }

    static Mlp load(std::istream &is)
    {
        char m[8];
        is.read(m, 8);
        if (!is || std::string(m, 8) != std::string(magic, 8))
            throw std::runtime_error("not a simswipt network file");
        auto get32 = [&]() {
            std::uint32_t v = 0;
            is.read(reinterpret_cast<char *>(&v), 4);
            if (!is)
                throw std::runtime_error("truncated network file");
            return v;
        };
        std::uint32_t count = get32();
        if (count < 2 || count > 64)
            throw std::runtime_error("bad layer count in network file");
        std::vector<int> sizes;
        for (std::uint32_t i = 0; i < count; ++i)
            sizes.push_back(static_cast<int>(get32()));
        std::uint8_t act = 0;
        is.read(reinterpret_cast<char *>(&act), 1);
        if (!is || act > 1)
            throw std::runtime_error("bad output activation in network file");
        Mlp net(sizes, static_cast<OutputActivation>(act));
        auto getd = [&]() {
            double v = 0.0;
            is.read(reinterpret_cast<char *>(&v), 8);
            if (!is)
                throw std::runtime_error("truncated network file");
            return v;
        };
        for (std::size_t l = 0; l < net.p_.weights.size(); ++l)
        {
            for (Eigen::Index i = 0; i < net.p_.weights[l].rows(); ++i)
                for (Eigen::Index j = 0; j < net.p_.weights[l].cols(); ++j)
                    net.p_.weights[l](i, j) = getd();
            for (Eigen::Index i = 0; i < net.p_.biases[l].size(); ++i)
                net.p_.biases[l][i] = getd();
        }
        return net;
    }

    void save(const std::string &path) const
    {
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open " + path);
        save(f);
    }
    static Mlp load(const std::string &path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open " + path);
        return load(f);
    }

    static constexpr char magic[8] = {'S', 'S', 'W', 'M', 'L', 'P', '0', '1'};

  private:
    std::vector<int> sizes_;
    OutputActivation out_ = OutputActivation::linear;
    MlpParams p_;
};

// Rescales g in place so its global norm is at most max_norm; returns the norm before clipping
inline double clip_gradient(MlpParams &g, double max_norm)
{
    const double n = std::sqrt(g.squared_norm());
    if (n > max_norm && n > 0.0)
        g.scale(max_norm / n);
    return n;
}

class Adam
{
  public:
    Adam() = default;
    Adam(const Mlp &net, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps)
    {
        for (const auto &w : net.params().weights)
        {
            m_.weights.push_back(RMat::Zero(w.rows(), w.cols()));
            v_.weights.push_back(RMat::Zero(w.rows(), w.cols()));
        }
        for (const auto &b : net.params().biases)
        {
            m_.biases.push_back(RVec::Zero(b.size()));
            v_.biases.push_back(RVec::Zero(b.size()));
        }
    }

    double learning_rate() const { return lr_; }

    // Gradient descent step on the loss whose gradient is g
    void step(Mlp &net, const MlpParams &g)
    {
        if (!g.finite())
            throw NumericError("non-finite gradient");
        if (lr_ == 0.0)
            return;
        ++t_;
        const double c1 = 1.0 - std::pow(b1_, t_), c2 = 1.0 - std::pow(b2_, t_);
        MlpParams &p = net.params();
        for (std::size_t l = 0; l < p.weights.size(); ++l)
        {
            m_.weights[l] = b1_ * m_.weights[l] + (1.0 - b1_) * g.weights[l];
            v_.weights[l] = b2_ * v_.weights[l] + (1.0 - b2_) * g.weights[l].cwiseAbs2();
            p.weights[l].array() -= lr_ * (m_.weights[l].array() / c1) / ((v_.weights[l].array() / c2).sqrt() + eps_);
            m_.biases[l] = b1_ * m_.biases[l] + (1.0 - b1_) * g.biases[l];
            v_.biases[l] = b2_ * v_.biases[l] + (1.0 - b2_) * g.biases[l].cwiseAbs2();
            p.biases[l].array() -= lr_ * (m_.biases[l].array() / c1) / ((v_.biases[l].array() / c2).sqrt() + eps_);
        }
        if (!p.finite())
            throw NumericError("non-finite network parameters after update");
    }

  private:
    double lr_ = 1e-3, b1_ = 0.9, b2_ = 0.999, eps_ = 1e-8;
    int t_ = 0;
    MlpParams m_, v_;
};

} // namespace simswipt
