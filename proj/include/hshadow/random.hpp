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

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include "hshadow/errors.hpp"

namespace hshadow {

/// Philox4x32-10 counter-based generator.
///
/// Reference:
///     "Parallel random numbers: as easy as 1, 2, 3"
///     Salmon, Moraes, Dror, Shaw (SC 2011)
///
/// The 64-bit key selects the experiment, the upper half of the 128-bit
/// counter selects the stream (one per shot), and the lower half counts
/// blocks within the stream. Two streams never share a counter value, so
/// their outputs are independent for any pair of distinct indices.
class PhiloxStream {
   public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    PhiloxStream(std::uint64_t key, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)}, stream_(stream) {
    }

    static constexpr result_type min() {
        return 0;
    }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() {
        if (cursor_ == 2) {
            refill();
        }
        return buffer_[cursor_++];
    }

    /// One Philox4x32-10 evaluation.
    static Block bijection(Block ctr, Key key) {
        constexpr std::uint32_t kMul0 = 0xD2511F53;
        constexpr std::uint32_t kMul1 = 0xCD9E8D57;
        constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
        constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

   private:
    void refill() {
        const Block ctr{
            static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        ++block_;
        const Block out = bijection(ctr, key_);
        buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
        buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
        cursor_ = 0;
    }

    Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int cursor_ = 2;
};

/// Independent, reproducible stream for one shot of an experiment.
inline PhiloxStream seed_stream(std::uint64_t master_seed, std::uint64_t shot_index) {
    return PhiloxStream(master_seed, shot_index);
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Rng>
double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by rejection; exact for every n.
template <class Rng>
std::uint64_t uniform_index(Rng &rng, std::uint64_t n) {
    if (n == 0) {
        throw UsageError("uniform_index over an empty range");
    }
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = rng();
    while (v >= limit) {
        v = rng();
    }
    return v % n;
}

/// Index drawn from a cumulative distribution whose last entry is the total
/// mass (normally 1).
template <class Rng>
std::size_t sample_cumulative(Rng &rng, std::span<const double> cumulative) {
    const double u = uniform01(rng) * cumulative.back();
    std::size_t lo = 0;
    std::size_t hi = cumulative.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (u < cumulative[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

}  // namespace hshadow
