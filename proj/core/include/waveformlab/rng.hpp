// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>

namespace waveformlab {

// Deterministic PRNG (PCG XSH-RR 64/32). The standard <random> distributions
// are implementation-defined, so everything downstream uses the explicit
// samplers below; identical (seed, stream) pairs produce identical draws on
// every platform, which is what makes realizations and CSV outputs
// byte-reproducible.
class Pcg32 {
  public:
    explicit Pcg32(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform double in [0, 1) with 53 random bits.
    double next_double();

  private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

// SplitMix64 bijective mixer; used to derive independent stream keys.
std::uint64_t splitmix64(std::uint64_t x);

// Folds a tag into a stream key. Chains of mix_key(seed, tag0, tag1, ...)
// give every (region, cluster, ray, trial) its own decorrelated substream.
std::uint64_t mix_key(std::uint64_t key, std::uint64_t tag);

// --- explicit samplers ----------------------------------------------------

// Standard normal via Box-Muller (one value per call, two uniforms consumed).
double sample_normal(Pcg32 &rng);

// Exp(1) via inversion.
double sample_exponential(Pcg32 &rng);

// Poisson(lambda) via sequential inversion; exact for the moderate rates
// used here (lambda up to a few hundred). lambda < 0 is an argument error.
int sample_poisson(Pcg32 &rng, double lambda);

// von Mises(mean, kappa) on (mean - pi, mean + pi], Best-Fisher rejection.
// kappa = 0 degenerates to the uniform law on the circle.
double sample_von_mises(Pcg32 &rng, double mean, double kappa);

// von Mises truncated to the sector [mean - width/2, mean + width/2] by
// rejection; the sector is centred on the mode so acceptance is at least
// width / (2 pi).
double sample_von_mises_sector(Pcg32 &rng, double mean, double kappa,
                               double width);

} // namespace waveformlab
