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

#include "waveformlab/linksim.hpp"

using namespace waveformlab;
using std::complex;

namespace {

int hamming(const std::vector<int> &a, const std::vector<int> &b) {
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

std::vector<int> index_bits(unsigned value, int width) {
    std::vector<int> bits(width);
    for (int i = 0; i < width; ++i) {
        bits[i] = static_cast<int>((value >> (width - 1 - i)) & 1u);
    }
    return bits;
}

SparseChannelSpec three_tap_otfs(int n) {
    SparseChannelSpec spec;
    spec.waveform = WaveformSpec::otfs(n, n / 4);
    spec.taps.push_back({std::sqrt(0.5) * complex<double>(1.0, 0.0), 0, 0});
    spec.taps.push_back({std::sqrt(0.3) * complex<double>(0.0, 1.0), 1, 1});
    spec.taps.push_back({std::sqrt(0.2) * complex<double>(-1.0, 0.0), 2, -1});
    return spec;
}

ChannelSource static_sparse_source(int frame_len, std::uint64_t seed) {
    ChannelConfig cfg;
    cfg.frame_len = frame_len;
    cfg.num_regions = 1;
    cfg.cluster_rate = 1e-9; // clamped to a single cluster
    cfg.ray_rate = 1e-9;     // single ray
    cfg.speed_mps = 0.0;
    cfg.shadow_std_db = 0.0;
    cfg.max_excess_delay_s = 9.0 / cfg.bandwidth_hz;
    return ChannelSource{cfg, Regime::sparse, seed};
}

} // namespace

TEST_SUITE("linksim") {

TEST_CASE("QAM constellations have unit average energy") {
    for (int m : {4, 16, 64, 256}) {
        const int width = static_cast<int>(std::lround(std::log2(m)));
        double energy = 0.0;
        for (unsigned v = 0; v < static_cast<unsigned>(m); ++v) {
            const CVec s = modulate(index_bits(v, width), m);
            REQUIRE(s.size() == 1);
            energy += std::norm(s[0]);
        }
        CHECK(energy / m == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("modulate/demodulate round trip") {
    Pcg32 rng(123, 0);
    for (int m : {4, 16, 64, 256}) {
        const int width = static_cast<int>(std::lround(std::log2(m)));
        const std::vector<int> bits = random_bits(rng, 24 * width);
        const CVec symbols = modulate(bits, m);
        CHECK(demodulate(symbols, m) == bits);
        // Slicing constellation points is the identity.
        const CVec sliced = slice_symbols(symbols, m);
        CHECK((sliced - symbols).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS((void)modulate({0, 1, 1}, 4), std::invalid_argument);
    CHECK_THROWS_AS((void)modulate({0, 1}, 8), std::invalid_argument);
}

TEST_CASE("Gray mapping: nearest neighbours differ in one bit") {
    const int m = 16;
    const int width = 4;
    const double spacing = 2.0 / std::sqrt(10.0); // adjacent 16-QAM levels
    std::vector<CVec> points;
    std::vector<std::vector<int>> bits;
    for (unsigned v = 0; v < 16; ++v) {
        bits.push_back(index_bits(v, width));
        points.push_back(modulate(bits.back(), m));
    }
    int adjacent_pairs = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (std::abs(points[i][0] - points[j][0]) < spacing + 1e-9) {
                ++adjacent_pairs;
                CHECK(hamming(bits[i], bits[j]) == 1);
            }
        }
    }
    CHECK(adjacent_pairs == 24); // 2 * 4 * 3 horizontal + vertical edges
}

TEST_CASE("MMSE equalizer recovers noiseless symbols") {
    Pcg32 rng(55, 2);
    const int n = 16;
    CMat h(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            h(r, c) = complex<double>(rng.next_double() - 0.5,
                                      rng.next_double() - 0.5) /
                      std::sqrt(static_cast<double>(n));
        }
    }
    h += CMat::Identity(n, n); // keep it well conditioned
    const CVec x = modulate(random_bits(rng, 2 * n), 4);
    const CVec xhat = equalize_mmse(h, h * x, 0.0);
    CHECK((xhat - x).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("MMSE shrinks toward zero under noise regularization") {
    const CMat h = CMat::Identity(4, 4);
    CVec y(4);
    y << 1.0, -1.0, 1.0, -1.0;
    const CVec xhat = equalize_mmse(h, y, 1.0);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(xhat[i] - y[i] / 2.0) < 1e-12);
    }
}

TEST_CASE("MRC on a diagonal channel is exact and reports dead columns") {
    CMat h = CMat::Zero(4, 4);
    h(0, 0) = complex<double>(0.0, 2.0);
    h(1, 1) = complex<double>(-0.5, 0.0);
    h(2, 2) = complex<double>(1.0, 1.0);
    // Column 3 carries nothing.
    CVec x(4);
    x << complex<double>(1, 1), complex<double>(-1, 1), complex<double>(1, -1),
        complex<double>(-1, -1);
    std::vector<int> dead;
    const CVec xhat = equalize_mrc(h, h * x, &dead);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(xhat[i] - x[i]) < 1e-12);
    }
    CHECK(std::abs(xhat[3]) == 0.0);
    REQUIRE(dead.size() == 1);
    CHECK(dead[0] == 3);
}

TEST_CASE("multi-tap columns combine the full path power") {
    const SparseChannelSpec spec = three_tap_otfs(16);
    const CMat h = sparse_oracle_matrix(spec);
    for (int c = 0; c < h.cols(); ++c) {
        CHECK(h.col(c).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("matched-filter SIC detects through a three-tap channel") {
    const SparseChannelSpec spec = three_tap_otfs(16);
    const CMat h = sparse_oracle_matrix(spec);
    Pcg32 rng(77, 0);
    const std::vector<int> bits = random_bits(rng, 2 * 16);
    const CVec x = modulate(bits, 4);
    const CVec y = h * x; // noiseless
    // Plain MRC suffers self-interference on a 3-tap channel...
    const CVec mrc = equalize_mrc(h, y);
    const int mrc_errors = hamming(demodulate(mrc, 4), bits);
    // ...while the iterative refinement resolves it completely.
    const CVec sic = equalize_mrc_sic(h, y, 1e-6, 4);
    CHECK(hamming(demodulate(sic, 4), bits) == 0);
    CHECK(hamming(demodulate(sic, 4), bits) <= mrc_errors);
}

TEST_CASE("impulse-pilot estimation is exact on integer sparse channels") {
    for (const auto &wf :
         {WaveformSpec::afdm(32, 2), WaveformSpec::otfs(32, 8)}) {
        SparseChannelSpec spec;
        spec.waveform = wf;
        spec.taps.push_back({complex<double>(0.7, 0.1), 0, 0});
        spec.taps.push_back({complex<double>(-0.3, 0.4), 2, 1});
        spec.taps.push_back({complex<double>(0.1, -0.4), 4, -2});
        const CMat h = sparse_oracle_matrix(spec);
        Pcg32 rng(5, 5);
        const ChannelEstimate est =
            estimate_channel_simple(h, wf, 0.0, rng, 4);
        CHECK(!est.empty);
        CHECK(est.taps_detected == 3);
        CHECK(est.nmse < 1e-20);
    }
}

TEST_CASE("comb-pilot estimation is exact at unit spacing") {
    const WaveformSpec wf = WaveformSpec::ofdm(32);
    SparseChannelSpec spec;
    spec.waveform = wf;
    spec.taps.push_back({complex<double>(0.8, 0.0), 0, 0});
    spec.taps.push_back({complex<double>(0.0, 0.6), 3, 0});
    const CMat h = sparse_oracle_matrix(spec); // quasi-static: diagonal
    Pcg32 rng(6, 6);
    const ChannelEstimate dense =
        estimate_channel_simple(h, wf, 0.0, rng, 1);
    CHECK(dense.nmse < 1e-20);
    // Interpolated estimation at spacing 4 is close but not exact.
    const ChannelEstimate interp =
        estimate_channel_simple(h, wf, 0.0, rng, 4);
    CHECK(interp.nmse < 0.2);
}

TEST_CASE("sparse-regime draws snap to the grid") {
    ChannelConfig cfg;
    cfg.frame_len = 32;
    cfg.num_regions = 2;           // collapsed to one by the regime
    cfg.cluster_rate = 4.0;
    cfg.ray_rate = 3.0;            // truncated to one ray per cluster
    cfg.speed_mps = 120.0;
    const ChannelSource source{cfg, Regime::sparse, 99};
    const ChannelRealization real = draw_channel(source, 0);
    REQUIRE(real.regions.size() == 1);
    double power = 0.0;
    for (const auto &cl : real.regions[0].clusters) {
        REQUIRE(cl.rays.size() == 1);
        const Ray &ray = cl.rays[0];
        CHECK(cl.delay_norm_total ==
              doctest::Approx(std::round(cl.delay_norm_total)).epsilon(1e-12));
        CHECK(ray.doppler_norm_total ==
              doctest::Approx(std::round(ray.doppler_norm_total)).epsilon(1e-12));
        power += std::norm(ray.gain);
    }
    CHECK(power == doctest::Approx(1.0).epsilon(1e-9));

    // The proposed regime keeps the fractional geometry.
    const ChannelSource prop{cfg, Regime::proposed, 99};
    const ChannelRealization full = draw_channel(prop, 0);
    CHECK(full.regions.size() == 2);
}

TEST_CASE("BER sweep is reproducible and thread-count invariant") {
    LinkConfig link;
    link.waveform = WaveformSpec::ofdm(16);
    link.snr_grid_db = {2.0, 6.0};
    link.num_trials = 128;
    link.min_errors = 1000000; // never stop early
    const ChannelSource source = static_sparse_source(16, 4242);

    link.num_threads = 1;
    const LinkReport serial = run_ber(link, source);
    link.num_threads = 4;
    const LinkReport parallel = run_ber(link, source);
    REQUIRE(serial.rows.size() == 2);
    REQUIRE(parallel.rows.size() == 2);
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        CHECK(serial.rows[i].bit_errors == parallel.rows[i].bit_errors);
        CHECK(serial.rows[i].bits == parallel.rows[i].bits);
        CHECK(serial.rows[i].ber_mc == parallel.rows[i].ber_mc);
        CHECK(serial.rows[i].trials == parallel.rows[i].trials);
    }
}

TEST_CASE("BER sweep stops at the error budget in whole batches") {
    LinkConfig link;
    link.waveform = WaveformSpec::ofdm(16);
    link.snr_grid_db = {0.0};
    link.num_trials = 10000;
    link.min_errors = 10; // reached inside the first 64-trial batch
    const ChannelSource source = static_sparse_source(16, 7);
    const LinkReport report = run_ber(link, source);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].trials == 64);
    CHECK(report.rows[0].bit_errors >= 10);
    CHECK(report.rows[0].ber_ci_low <= report.rows[0].ber_mc);
    CHECK(report.rows[0].ber_ci_high >= report.rows[0].ber_mc);
}

TEST_CASE("Monte Carlo BER tracks the AWGN analytic curve") {
    LinkConfig link;
    link.waveform = WaveformSpec::ofdm(32);
    link.snr_grid_db = {4.0};
    link.num_trials = 400;
    link.min_errors = 1000000;
    const ChannelSource source = static_sparse_source(32, 11);
    const LinkReport report = run_ber(link, source);
    const auto &row = report.rows[0];
    REQUIRE(row.bit_errors > 100);
    const double se =
        std::sqrt(row.ber_analytic * (1.0 - row.ber_analytic) /
                  static_cast<double>(row.bits));
    CHECK(std::abs(row.ber_mc - row.ber_analytic) < 4.0 * se);
}

TEST_CASE("estimated-CSI sweeps report the estimation NMSE") {
    LinkConfig link;
    link.waveform = WaveformSpec::ofdm(16);
    link.snr_grid_db = {20.0};
    link.num_trials = 64;
    link.min_errors = 1000000;
    link.csi = CsiMode::estimated;
    link.pilot_spacing = 2;
    ChannelSource source = static_sparse_source(16, 5);
    source.config.max_excess_delay_s = 3.0 / source.config.bandwidth_hz;
    const LinkReport report = run_ber(link, source);
    CHECK(report.rows[0].nmse_ce >= 0.0);
    CHECK(report.rows[0].nmse_ce < 1.0);
}

TEST_CASE("kernel adjoint synthesis matches the dense kernel") {
    Pcg32 rng(3, 1);
    const int n = 32;
    for (const auto &spec : {WaveformSpec::ofdm(n), WaveformSpec::afdm(n, 2),
                             WaveformSpec::otfs(n, 8),
                             WaveformSpec::dfts(n, 4, 16)}) {
        const CVec x = modulate(random_bits(rng, 2 * spec.output_dim()), 4);
        const CVec fast = apply_kernel_adjoint(spec, x);
        const CVec dense = build_kernel(spec).adjoint() * x;
        CHECK((fast - dense).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("a single tone has 0 dB PAPR") {
    const WaveformSpec spec = WaveformSpec::ofdm(64);
    CVec x = CVec::Zero(64);
    x[5] = 1.0;
    CHECK(std::abs(papr_db(spec, x, 4)) < 1e-9);
}

TEST_CASE("PAPR CCDF is monotone and thread-count invariant") {
    const WaveformSpec spec = WaveformSpec::ofdm(64);
    const std::vector<double> thresholds = {2.0, 4.0, 6.0, 8.0};
    const auto serial = measure_papr(spec, 4, 200, 4, 33, thresholds, 1);
    const auto parallel = measure_papr(spec, 4, 200, 4, 33, thresholds, 3);
    REQUIRE(serial.size() == 4);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].prob == parallel[i].prob);
        if (i > 0) CHECK(serial[i].prob <= serial[i - 1].prob);
    }
    CHECK(serial[0].prob > 0.5); // nearly every frame exceeds 2 dB
}

TEST_CASE("overhead accounting at hand-computed operating points") {
    // OFDM: CP of ceil(1.2 * 5) = 6 samples and 1-in-4 pilot tones.
    CHECK(overhead_eta(WaveformSpec::ofdm(64), 5.0, 0.02, 4) ==
          doctest::Approx(64.0 / 70.0 * 0.75).epsilon(1e-12));
    // AFDM: one pilot symbol plus a guard of ceil(l) * (2 ceil(k) + 1) bins.
    CHECK(overhead_eta(WaveformSpec::afdm(64, 2), 0.5, 2.3, 4) ==
          doctest::Approx(56.0 / 65.0).epsilon(1e-12));
    // Guards never drive the payload negative.
    CHECK(overhead_eta(WaveformSpec::otfs(64, 8), 30.0, 3.0, 4) >= 0.0);
}

TEST_CASE("spectral efficiency steps through the supported orders") {
    // Gray QPSK needs gamma ~ 9.55 for BER 1e-3.
    CHECK(spectral_efficiency(5.0, 1e-3, 1.0) == 0.0);
    CHECK(spectral_efficiency(10.0, 1e-3, 1.0) == doctest::Approx(2.0));
    CHECK(spectral_efficiency(1e9, 1e-3, 0.5) == doctest::Approx(4.0));
    // Higher gamma never selects a smaller order.
    double last = 0.0;
    for (double g : {1.0, 10.0, 50.0, 300.0, 3000.0}) {
        const double se = spectral_efficiency(g, 1e-3, 1.0);
        CHECK(se >= last);
        last = se;
    }
}

TEST_CASE("receiver-centric mean rho vanishes on ideal sparse channels") {
    ChannelConfig cfg;
    cfg.frame_len = 32;
    cfg.num_regions = 1;
    cfg.cluster_rate = 3.0;
    cfg.ray_rate = 1e-9;
    cfg.speed_mps = 0.0;
    cfg.max_excess_delay_s = 3.0 / cfg.bandwidth_hz;
    const ChannelSource source{cfg, Regime::sparse, 31};
    // Static integer taps: the impulse-pilot estimate is exact, so the
    // residual ratio is numerically zero.
    const double rho =
        mean_rho(source, WaveformSpec::otfs(32, 8), CsiMode::estimated, 8, 4);
    CHECK(rho < 1e-12);
    // Perfect-CSI rho against the integer-grid ideal is zero as well.
    const double rho_perfect =
        mean_rho(source, WaveformSpec::otfs(32, 8), CsiMode::perfect, 8, 4);
    CHECK(rho_perfect < 1e-12);
}

} // TEST_SUITE
