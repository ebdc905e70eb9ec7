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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace simswipt
{

// Batch-means estimator of a sample mean and its standard error. Samples are assigned to
// consecutive equal batches; batch sums are reduced in a fixed order.
class BatchMeans
{
  public:
    explicit BatchMeans(std::size_t expected = 1, std::size_t batches = 200)
    {
        batches = std::max<std::size_t>(1, std::min(batches, expected));
        batch_size_ = std::max<std::size_t>(1, expected / batches);
    }

    void add(double x)
    {
        cur_sum_ += x;
        if (++cur_count_ == batch_size_)
            flush();
    }

    std::size_t count() const { return total_ + cur_count_; }

    double mean() const
    {
        double s = pairwise(sums_, 0, sums_.size()) + cur_sum_;
        std::size_t n = count();
        return n ? s / static_cast<double>(n) : 0.0;
    }

    // Standard error of mean() from the spread of full batch means
    double std_error() const
    {
        const std::size_t nb = sums_.size();
        if (nb < 2)
            return 0.0;
        double mu = 0.0;
        for (double s : sums_)
            mu += s / static_cast<double>(batch_size_);
        mu /= static_cast<double>(nb);
        double var = 0.0;
        for (double s : sums_)
        {
            double d = s / static_cast<double>(batch_size_) - mu;
            var += d * d;
        }
        var /= static_cast<double>(nb - 1);
        return std::sqrt(var / static_cast<double>(nb));
    }

  private:
    void flush()
    {
        sums_.push_back(cur_sum_);
        total_ += cur_count_;
        cur_sum_ = 0.0;
        cur_count_ = 0;
    }

    static double pairwise(const std::vector<double> &v, std::size_t lo, std::size_t hi)
    {
        if (hi - lo <= 8)
        {
            double s = 0.0;
            for (std::size_t i = lo; i < hi; ++i)
                s += v[i];
            return s;
        }
        std::size_t mid = lo + (hi - lo) / 2;
        return pairwise(v, lo, mid) + pairwise(v, mid, hi);
    }

    std::size_t batch_size_ = 1;
    std::vector<double> sums_;
    double cur_sum_ = 0.0;
    std::size_t cur_count_ = 0;
    std::size_t total_ = 0;
};

struct Estimate
{
    double mean = 0.0;
    double std_error = 0.0;

    static Estimate of(const BatchMeans &b) { return {b.mean(), b.std_error()}; }

    // |value - mean| in units of the standard error (infinite when se = 0 and they differ)
    double z(double value) const
    {
        double d = std::abs(value - mean);
        if (std_error > 0.0)
            return d / std_error;
        return d == 0.0 ? 0.0 : INFINITY;
    }
};

} // namespace simswipt
