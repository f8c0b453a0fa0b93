// Copyright 2026 The hshadow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "hshadow/errors.hpp"

namespace hshadow {

/// Pairwise (cascade) summation. The association order depends only on the
/// length, so equal inputs always give bit-identical sums.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) {
            s += x;
        }
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double mean(std::span<const double> v) {
    if (v.empty()) {
        throw UsageError("mean of an empty sample");
    }
    return pairwise_sum(v) / static_cast<double>(v.size());
}

/// Sample standard deviation with the n - 1 denominator; 0 for n < 2.
inline double sample_sd(std::span<const double> v) {
    if (v.size() < 2) {
        return 0.0;
    }
    const double m = mean(v);
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        sq[i] = (v[i] - m) * (v[i] - m);
    }
    return std::sqrt(pairwise_sum(sq) / static_cast<double>(v.size() - 1));
}

inline double median(std::vector<double> v) {
    if (v.empty()) {
        throw UsageError("median of an empty sample");
    }
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

/// [begin, end) of batch b when n items are split into k contiguous
/// batches; the first n % k batches hold one extra item.
inline std::pair<std::size_t, std::size_t> batch_range(std::size_t n, std::size_t k, std::size_t b) {
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    const std::size_t begin = b * base + std::min(b, extra);
    return {begin, begin + base + (b < extra ? 1 : 0)};
}

struct RobustEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
    std::size_t batches = 1;
};

/// Standard error of a median over k batch means with spread sd. Beyond two
/// batches the median of normal batch means has asymptotic variance
/// (π/2)·sd²/k.
inline double median_std_error(double batch_sd, std::size_t k) {
    const double factor = k > 2 ? std::sqrt(std::numbers::pi / 2) : 1.0;
    return factor * batch_sd / std::sqrt(static_cast<double>(k));
}

/// Median of k contiguous batch means. k = 1 is the plain mean, with the
/// usual sd/√n error.
inline RobustEstimate median_of_means(std::span<const double> values, std::size_t k) {
    if (values.empty()) {
        throw UsageError("median-of-means over an empty sample");
    }
    if (k < 1 || k > values.size()) {
        throw UsageError("batch count must lie in [1, sample size]");
    }
    RobustEstimate r;
    r.count = values.size();
    r.batches = k;
    if (k == 1) {
        r.value = mean(values);
        r.std_error = sample_sd(values) / std::sqrt(static_cast<double>(values.size()));
        return r;
    }
    std::vector<double> means(k);
    for (std::size_t b = 0; b < k; ++b) {
        const auto [begin, end] = batch_range(values.size(), k, b);
        means[b] = mean(values.subspan(begin, end - begin));
    }
    r.value = median(means);
    r.std_error = median_std_error(sample_sd(means), k);
    return r;
}

/// 2·⌈ln(2M/δ)⌉ batches for M targets at failure probability δ.
inline std::size_t default_batches(std::size_t m_targets = 1, double delta = 0.01) {
    if (m_targets < 1 || !(delta > 0.0 && delta < 1.0)) {
        throw UsageError("batch rule needs m_targets >= 1 and delta in (0, 1)");
    }
    return 2 * static_cast<std::size_t>(std::ceil(std::log(2.0 * static_cast<double>(m_targets) / delta)));
}

/// default_batches, falling back to a single batch for small samples.
inline std::size_t batches_for(std::size_t count, std::size_t m_targets = 1, double delta = 0.01) {
    const std::size_t k = default_batches(m_targets, delta);
    return count < 2 * k ? 1 : k;
}

}  // namespace hshadow
