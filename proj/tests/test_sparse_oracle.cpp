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
#include <complex>
#include <stdexcept>

#include <doctest.h>

#include "waveformlab/sparse_oracle.hpp"

using namespace waveformlab;
using std::complex;

namespace {

// Materializes the downscale premise as a full realization: one region, one
// ray per cluster, integer delay/Doppler totals.
ChannelRealization realization_from_taps(const SparseChannelSpec &spec) {
    ChannelRealization real;
    real.config.frame_len = spec.waveform.frame_len;
    real.config.num_regions = 1;
    StationarityRegion region;
    region.index = 0;
    region.sample_begin = 0;
    region.sample_end = spec.waveform.frame_len;
    for (const auto &tap : spec.taps) {
        Cluster cl;
        cl.delay_norm_total = static_cast<double>(tap.delay_int);
        Ray ray;
        ray.gain = tap.gain;
        ray.doppler_norm_total = static_cast<double>(tap.doppler_int);
        cl.rays.push_back(ray);
        region.clusters.push_back(cl);
    }
    real.regions.push_back(region);
    return real;
}

SparseChannelSpec random_taps(const WaveformSpec &waveform, int count,
                              int max_delay, int max_doppler,
                              std::uint64_t seed) {
    SparseChannelSpec spec;
    spec.waveform = waveform;
    Pcg32 rng(seed, 17);
    for (int i = 0; i < count; ++i) {
        SparseTap tap;
        tap.gain = complex<double>(2.0 * rng.next_double() - 1.0,
                                   2.0 * rng.next_double() - 1.0) /
                   std::sqrt(static_cast<double>(count));
        tap.delay_int = static_cast<int>(rng.next_double() * (max_delay + 1));
        tap.doppler_int =
            static_cast<int>(rng.next_double() * (2 * max_doppler + 1)) -
            max_doppler;
        spec.taps.push_back(tap);
    }
    return spec;
}

double oracle_deviation(const SparseChannelSpec &spec) {
    const ChannelRealization real = realization_from_taps(spec);
    const CMat general =
        effective_channel(assemble_global(real), spec.waveform).matrix;
    const CMat oracle = sparse_oracle_matrix(spec);
    return (general - oracle).cwiseAbs().maxCoeff();
}

} // namespace

TEST_SUITE("sparse_oracle") {

TEST_CASE("closed forms match the general path on the integer grid") {
    for (int n : {16, 24, 64}) {
        const int kmax = 2;
        CHECK(oracle_deviation(random_taps(WaveformSpec::ofdm(n), 4, 9, 3,
                                           100 + n)) < 1e-9);
        CHECK(oracle_deviation(random_taps(WaveformSpec::afdm(n, kmax), 4, 2,
                                           kmax, 200 + n)) < 1e-9);
        CHECK(oracle_deviation(random_taps(WaveformSpec::otfs(n, n / 4), 4,
                                           n / 4 - 1, 3, 300 + n)) < 1e-9);
        // Full-allocation spreading: closed form exact for any Doppler.
        CHECK(oracle_deviation(random_taps(WaveformSpec::dfts(n, 0, n), 4, 9,
                                           3, 400 + n)) < 1e-9);
        // Partial allocation: exact in the quasi-static case.
        CHECK(oracle_deviation(random_taps(WaveformSpec::dfts(n, 2, n / 2), 4,
                                           9, 0, 500 + n)) < 1e-9);
    }
}

TEST_CASE("quasi-static OFDM is exactly diagonal") {
    const WaveformSpec spec = WaveformSpec::ofdm(32);
    SparseChannelSpec taps = random_taps(spec, 5, 11, 0, 7);
    const ChannelRealization real = realization_from_taps(taps);
    const CMat h_eff = effective_channel(assemble_global(real), spec).matrix;
    double offdiag = 0.0;
    for (int r = 0; r < 32; ++r) {
        for (int c = 0; c < 32; ++c) {
            if (r != c) offdiag = std::max(offdiag, std::abs(h_eff(r, c)));
        }
    }
    CHECK(offdiag < 1e-12);
}

TEST_CASE("each tap contributes one unit-modulus entry per row") {
    for (const auto &spec :
         {WaveformSpec::afdm(16, 2), WaveformSpec::otfs(16, 4)}) {
        SparseChannelSpec taps;
        taps.waveform = spec;
        SparseTap tap;
        tap.gain = complex<double>(0.6, -0.8); // modulus 1
        tap.delay_int = 3;
        tap.doppler_int = 1;
        taps.taps.push_back(tap);
        const CMat oracle = sparse_oracle_matrix(taps);
        for (int r = 0; r < oracle.rows(); ++r) {
            int nonzero = 0;
            for (int c = 0; c < oracle.cols(); ++c) {
                const double mag = std::abs(oracle(r, c));
                if (mag > 1e-12) {
                    ++nonzero;
                    CHECK(mag == doctest::Approx(1.0).epsilon(1e-12));
                }
            }
            CHECK(nonzero == 1);
        }
    }
}

TEST_CASE("AFDM closed form requires an even grid") {
    SparseChannelSpec taps;
    taps.waveform = WaveformSpec::afdm(15, 1);
    taps.taps.push_back({complex<double>(1.0, 0.0), 1, 0});
    CHECK_THROWS_AS((void)sparse_afdm(taps), std::invalid_argument);
}

TEST_CASE("tap projection rounds to the grid and clamps Doppler") {
    ChannelRealization real;
    real.config.frame_len = 16;
    StationarityRegion region;
    region.sample_begin = 0;
    region.sample_end = 16;
    Cluster cl;
    cl.delay_norm_total = 2.6;
    Ray ray;
    ray.gain = complex<double>(0.5, 0.5);
    ray.doppler_norm_total = -1.4;
    cl.rays.push_back(ray);
    Ray fast = ray;
    fast.doppler_norm_total = 5.2; // beyond the AFDM tracking range
    cl.rays.push_back(fast);
    region.clusters.push_back(cl);
    real.regions.push_back(region);

    const SparseChannelSpec taps =
        project_taps(real, WaveformSpec::afdm(16, 2), 0);
    REQUIRE(taps.taps.size() == 2);
    CHECK(taps.taps[0].delay_int == 3);
    CHECK(taps.taps[0].doppler_int == -1);
    CHECK(taps.taps[1].doppler_int == 2); // clamped to kmax
}

TEST_CASE("region-0 ideal reference equals the projected closed form") {
    ChannelConfig cfg;
    cfg.frame_len = 24;
    cfg.num_regions = 2;
    cfg.cluster_rate = 3.0;
    cfg.ray_rate = 2.0;
    cfg.speed_mps = 60.0;
    cfg.rng_seed = 9;
    const ChannelRealization real = generate_realization(cfg);
    const WaveformSpec spec = WaveformSpec::otfs(24, 4);
    const CMat ideal = ideal_reference(real, spec, IdealRef::region0);
    const CMat oracle = sparse_oracle_matrix(project_taps(real, spec, 0));
    CHECK((ideal - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fractional taps break the downscale premise") {
    // The closed form is only claimed on the integer grid; a half-bin delay
    // must produce a visible residual, otherwise the premise tests nothing.
    const WaveformSpec spec = WaveformSpec::afdm(16, 2);
    SparseChannelSpec taps;
    taps.waveform = spec;
    taps.taps.push_back({complex<double>(1.0, 0.0), 2, 1});
    ChannelRealization real = realization_from_taps(taps);
    real.regions[0].clusters[0].delay_norm_total = 2.5;
    const CMat general =
        effective_channel(assemble_global(real), spec).matrix;
    const CMat oracle = sparse_oracle_matrix(taps);
    CHECK((general - oracle).cwiseAbs().maxCoeff() > 1e-3);
}

} // TEST_SUITE
