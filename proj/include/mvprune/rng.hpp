// Copyright 2026 The mvprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mvprune {

/// SplitMix64 generator.
///
/// State transition: state += 0x9E3779B97F4A7C15, then the output is the
/// finalizer z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
/// z ^ (z >> 31). All derived draws below are defined in terms of next_u64() only, so integer
/// streams are identical on every platform. Gaussian draws additionally go through libm
/// (log, cos) and are reproducible wherever those are correctly rounded.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : m_state(seed) {}

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = (m_state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound), bound >= 1. Rejection sampling, no modulo bias.
    std::uint64_t uniform_below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x >= limit) {
                return x % bound;
            }
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (one value per call, no cached spare).
    double normal() noexcept {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t state() const noexcept { return m_state; }

private:
    std::uint64_t m_state;
};

}  // namespace mvprune
