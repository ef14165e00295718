// Copyright (c) the phflow contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef PHFLOW_RNG_HPP
#define PHFLOW_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace phflow {

/// Splitmix64 stream. Fully specified so datasets are reproducible across
/// implementations:
///   state += 0x9E3779B97F4A7C15
///   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   output = z ^ (z >> 31)
/// Uniform doubles take the top 53 bits: (x >> 11) * 2^-53, in [0, 1).
/// Normals use the Box-Muller transform on consecutive uniforms, returning
/// the cosine branch first and caching the sine branch.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller.
    double next_normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = next_double();
        double u2 = next_double();
        // Guard the log against u1 == 0.
        while (u1 <= 0.0) u1 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(phi);
        have_cached_ = true;
        return r * std::cos(phi);
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace phflow

#endif  // PHFLOW_RNG_HPP
