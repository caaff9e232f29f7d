// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "waveformlab/transforms.hpp"

using namespace waveformlab;

namespace {

ChannelRealization nonstationary_realization(int frame_len, std::uint64_t seed) {
    ChannelConfig cfg;
    cfg.frame_len = frame_len;
    cfg.num_regions = 2;
    cfg.cluster_rate = 3.0;
    cfg.ray_rate = 3.0;
    cfg.bandwidth_hz = 20e6;
    // Fast enough that Doppler bins are fractional but order one.
    cfg.speed_mps = 100.0;
    cfg.max_excess_delay_s = 0.3e-6; // fractional delays up to ~6 bins
    cfg.survival_prob = 0.5;
    cfg.rng_seed = seed;
    return generate_realization(cfg);
}

} // namespace

TEST_SUITE("transforms") {

TEST_CASE("waveform factories carry consistent parameters") {
    const WaveformSpec afdm = WaveformSpec::afdm(8, 1);
    CHECK(afdm.afdm_c1 == doctest::Approx(3.0 / 16.0).epsilon(1e-15));
    CHECK(afdm.afdm_c2 == doctest::Approx(1.0 / 16.0).epsilon(1e-15));

    const WaveformSpec otfs = WaveformSpec::otfs(24, 4);
    CHECK(otfs.otfs_doppler_bins == 6);
    CHECK(otfs.output_dim() == 24);

    const WaveformSpec dfts = WaveformSpec::dfts(32, 4, 16);
    CHECK(dfts.output_dim() == 16);
    CHECK(WaveformSpec::ofdm(16).output_dim() == 16);
}

TEST_CASE("invalid waveform parameters are rejected") {
    CHECK_THROWS_AS((void)WaveformSpec::otfs(24, 5), std::invalid_argument);
    CHECK_THROWS_AS((void)WaveformSpec::afdm(8, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)WaveformSpec::dfts(16, 8, 12), std::invalid_argument);

    WaveformSpec tampered = WaveformSpec::afdm(16, 2);
    tampered.afdm_c1 = 0.3; // no longer (2 kmax + 1) / (2N)
    CHECK_THROWS_AS(tampered.validate(), std::invalid_argument);
}

TEST_CASE("kernels are unitary (orthonormal rows for partial allocation)") {
    const int n = 64;
    const WaveformSpec specs[] = {
        WaveformSpec::ofdm(n),
        WaveformSpec::afdm(n, 2),
        WaveformSpec::otfs(n, 8),
        WaveformSpec::dfts(n, 0, n),
        WaveformSpec::dfts(n, 8, 16),
    };
    for (const auto &spec : specs) {
        const CMat a = build_kernel(spec);
        const int rows = spec.output_dim();
        CHECK(a.rows() == rows);
        const CMat g = a * a.adjoint();
        CHECK((g - CMat::Identity(rows, rows)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("OFDM kernel is the unitary DFT") {
    const CMat a = build_kernel(WaveformSpec::ofdm(16));
    CHECK((a - dft_matrix(16)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("effective channel conjugates by the kernel") {
    const ChannelRealization real = nonstationary_realization(16, 3);
    const ChannelMatrix h = assemble_global(real);
    const WaveformSpec spec = WaveformSpec::afdm(16, 1);
    const EffectiveChannel eff = effective_channel(h, spec);
    const CMat a = build_kernel(spec);
    CHECK((eff.matrix - a * h.entries * a.adjoint()).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK(eff.source == EffChanSource::triple_product);
}

TEST_CASE("unitary transforms preserve channel energy") {
    const ChannelRealization real = nonstationary_realization(32, 11);
    const ChannelMatrix h = assemble_global(real);
    const double hf = h.entries.norm();
    for (const auto &spec : {WaveformSpec::ofdm(32), WaveformSpec::afdm(32, 2),
                             WaveformSpec::otfs(32, 4),
                             WaveformSpec::dfts(32, 0, 32)}) {
        const double ef = effective_channel(h, spec).matrix.norm();
        CHECK(std::abs(ef - hf) < 1e-9);
    }
}

TEST_CASE("entrywise evaluation matches the triple product") {
    // Two stationarity regions, multi-ray clusters, fractional delays and
    // Dopplers: the per-ray sums must agree with A H A^H entry by entry.
    for (std::uint64_t seed : {1ULL, 2ULL}) {
        const ChannelRealization real16 = nonstationary_realization(16, seed);
        const ChannelMatrix h16 = assemble_global(real16);
        for (const auto &spec :
             {WaveformSpec::ofdm(16), WaveformSpec::afdm(16, 1),
              WaveformSpec::dfts(16, 2, 8)}) {
            const CMat direct = effective_channel(h16, spec).matrix;
            const EffectiveChannel entry =
                effective_channel_entrywise(real16, spec);
            CHECK(entry.source == EffChanSource::entry_formula);
            CHECK((direct - entry.matrix).cwiseAbs().maxCoeff() < 1e-8);
        }

        const ChannelRealization real24 = nonstationary_realization(24, seed);
        const ChannelMatrix h24 = assemble_global(real24);
        const WaveformSpec otfs = WaveformSpec::otfs(24, 4);
        const CMat direct = effective_channel(h24, otfs).matrix;
        const CMat entry = effective_channel_entrywise(real24, otfs).matrix;
        CHECK((direct - entry).cwiseAbs().maxCoeff() < 1e-8);
    }
}

} // TEST_SUITE
