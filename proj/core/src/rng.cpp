// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "waveformlab/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace waveformlab {

namespace {
constexpr std::uint64_t kPcgMultiplier = 6364136223846793005ULL;
// Rejection loops bail out after this many draws; hitting it means the
// parameters are broken (e.g. a sector of width ~0), not bad luck.
constexpr long kMaxRejectionIters = 10'000'000L;
} // namespace

Pcg32::Pcg32(std::uint64_t seed, std::uint64_t stream) {
    inc_ = (stream << 1u) | 1u;
    state_ = 0u;
    next_u32();
    state_ += seed;
    next_u32();
}

std::uint32_t Pcg32::next_u32() {
    std::uint64_t old = state_;
    state_ = old * kPcgMultiplier + inc_;
    auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

std::uint64_t Pcg32::next_u64() {
    std::uint64_t hi = next_u32();
    std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
}

double Pcg32::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t mix_key(std::uint64_t key, std::uint64_t tag) {
    return splitmix64(key ^ splitmix64(tag));
}

double sample_normal(Pcg32 &rng) {
    // Box-Muller; discard the second coordinate so calls stay stateless.
    double u1 = rng.next_double();
    double u2 = rng.next_double();
    // Guard against log(0).
    while (u1 <= 0.0) {
        u1 = rng.next_double();
    }
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

double sample_exponential(Pcg32 &rng) {
    return -std::log1p(-rng.next_double());
}

int sample_poisson(Pcg32 &rng, double lambda) {
    if (lambda < 0.0 || !std::isfinite(lambda)) {
        throw std::invalid_argument("sample_poisson: lambda must be finite and >= 0");
    }
    if (lambda == 0.0) {
        return 0;
    }
    // Sequential inversion on the CDF; numerically fine for the rates used
    // here. Work in log space only for the threshold.
    double target = std::exp(-lambda);
    double prod = 1.0;
    int k = -1;
    for (long guard = 0; guard < kMaxRejectionIters; ++guard) {
        prod *= rng.next_double();
        ++k;
        if (prod <= target) {
            return k;
        }
    }
    throw std::runtime_error("sample_poisson: inversion failed to terminate");
}

double sample_von_mises(Pcg32 &rng, double mean, double kappa) {
    constexpr double pi = std::numbers::pi;
    if (kappa < 0.0 || !std::isfinite(kappa)) {
        throw std::invalid_argument("sample_von_mises: kappa must be finite and >= 0");
    }
    if (kappa == 0.0) {
        return mean + pi * (2.0 * rng.next_double() - 1.0);
    }
    // Best-Fisher (1979) wrapped-Cauchy envelope rejection.
    double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
    double r = (1.0 + rho * rho) / (2.0 * rho);
    for (long guard = 0; guard < kMaxRejectionIters; ++guard) {
        double z = std::cos(pi * rng.next_double());
        double f = (1.0 + r * z) / (r + z);
        double c = kappa * (r - f);
        double u2 = rng.next_double();
        if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
            double u3 = rng.next_double();
            double angle = (u3 < 0.5 ? -1.0 : 1.0) * std::acos(f);
            double theta = mean + angle;
            // Wrap to (mean - pi, mean + pi].
            while (theta <= mean - pi) theta += 2.0 * pi;
            while (theta > mean + pi) theta -= 2.0 * pi;
            return theta;
        }
    }
    throw std::runtime_error("sample_von_mises: rejection failed to terminate");
}

double sample_von_mises_sector(Pcg32 &rng, double mean, double kappa,
                               double width) {
    constexpr double pi = std::numbers::pi;
    if (width <= 0.0 || width > 2.0 * pi + 1e-12) {
        throw std::invalid_argument(
            "sample_von_mises_sector: width must lie in (0, 2*pi]");
    }
    if (kappa == 0.0) {
        // Uniform on the sector; no rejection needed.
        return mean + width * (rng.next_double() - 0.5);
    }
    if (width >= 2.0 * pi - 1e-12) {
        return sample_von_mises(rng, mean, kappa);
    }
    double half = width / 2.0;
    for (long guard = 0; guard < kMaxRejectionIters; ++guard) {
        double theta = sample_von_mises(rng, mean, kappa);
        if (theta >= mean - half && theta <= mean + half) {
            return theta;
        }
    }
    throw std::runtime_error(
        "sample_von_mises_sector: rejection failed to terminate");
}

} // namespace waveformlab
