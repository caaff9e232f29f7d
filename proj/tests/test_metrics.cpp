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

#include "waveformlab/metrics.hpp"

using namespace waveformlab;

namespace {

double round4(double v) { return std::round(v * 1e4) / 1e4; }

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("regime indicators at the 120 km/h urban operating point") {
    const double v = 120.0 / 3.6;
    const RegimeIndicators ind =
        regime_indicators(v, 3.5e9, 20e6, 15e3, 0.5e-6, 1e-3);
    CHECK(ind.doppler_max_hz == doctest::Approx(388.8888888889).epsilon(1e-9));
    CHECK(ind.chi_tau == doctest::Approx(10.0).epsilon(1e-12));
    // k_max = f_D / delta_f
    CHECK(ind.chi_nu == doctest::Approx(388.8888888889 / 15e3).epsilon(1e-9));
    // One symbol spans T = 1/delta_f; drift B (v/c) T.
    CHECK(ind.delta_l_sym ==
          doctest::Approx(20e6 * (v / 3.0e8) / 15e3).epsilon(1e-9));
    CHECK(ind.chi_stat == doctest::Approx((1.0 / 15e3) / 1e-3).epsilon(1e-12));
}

TEST_CASE("indicator argument validation") {
    CHECK_THROWS_AS((void)regime_indicators(-1.0, 3.5e9, 20e6, 15e3, 0.5e-6, 1e-3),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)regime_indicators(10.0, 0.0, 20e6, 15e3, 0.5e-6, 1e-3),
                    std::invalid_argument);
}

TEST_CASE("Doppler spread saturates at the diameter for wide sectors") {
    const double v = 30.0;
    const double fd = v / 3.0e8 * 3.5e9;
    const RegimeIndicators wide =
        regime_indicators(v, 3.5e9, 20e6, 15e3, 0.5e-6, 1e-3, 6.0);
    CHECK(wide.doppler_spread_hz == doctest::Approx(2.0 * fd).epsilon(1e-12));
    const RegimeIndicators narrow =
        regime_indicators(v, 3.5e9, 20e6, 15e3, 0.5e-6, 1e-3, 0.1);
    CHECK(narrow.doppler_spread_hz < 0.2 * fd);
    CHECK(narrow.doppler_spread_hz > 0.0);
}

TEST_CASE("operating-point table matches the published 4-decimal values") {
    const auto rows = table1_rows();
    REQUIRE(rows.size() == 3);

    const double fd[3] = {97.2222, 388.8889, 972.2222};
    const double kmax500[3] = {0.1944, 0.7778, 1.9444};
    const double kmax60k[3] = {0.0016, 0.0065, 0.0162};
    const double dl500b20[3] = {0.0011, 0.0044, 0.0111};
    const double dl500b100[3] = {0.0056, 0.0222, 0.0556};
    const double speeds[3] = {30.0, 120.0, 300.0};

    for (int i = 0; i < 3; ++i) {
        CHECK(rows[i].speed_kmh == doctest::Approx(speeds[i]));
        CHECK(round4(rows[i].f_d_hz) == doctest::Approx(fd[i]));
        CHECK(round4(rows[i].l_max_b20) == doctest::Approx(10.0));
        CHECK(round4(rows[i].l_max_b100) == doctest::Approx(50.0));
        CHECK(round4(rows[i].k_max_df500) == doctest::Approx(kmax500[i]));
        CHECK(round4(rows[i].k_max_df60k) == doctest::Approx(kmax60k[i]));
        CHECK(round4(rows[i].delta_l_sym_df500_b20) ==
              doctest::Approx(dl500b20[i]));
        CHECK(round4(rows[i].delta_l_sym_df500_b100) ==
              doctest::Approx(dl500b100[i]));
    }
}

TEST_CASE("leakage split on a hand-worked 2x2 example") {
    CMat h_eff(2, 2);
    h_eff << 1.0, 0.1, 0.0, 1.0;
    const CMat h_id = CMat::Identity(2, 2);
    const LeakageReport rep = leakage_split(h_eff, h_id, 1.0);
    // gamma_sig = ||H_id||_F^2 Es / N = 2/2 = 1; leak = 0.01/2.
    CHECK(rep.gamma_sig == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.gamma_leak == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("finalize_report folds mismatch and noise into rho and gamma_eff") {
    LeakageReport partial;
    partial.gamma_sig = 1.0;
    partial.gamma_leak = 0.02;
    const LeakageReport rep = finalize_report(partial, 0.03, 0.1);
    CHECK(rep.rho == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(rep.gamma_id == doctest::Approx(10.0).epsilon(1e-12));
    // gamma_eff = sig / (noise + leak + mm) = 1 / 0.15.
    CHECK(rep.gamma_eff == doctest::Approx(1.0 / 0.15).epsilon(1e-12));
    // Same number through the saturating form.
    CHECK(effective_sinr(rep.gamma_id, rep.rho) ==
          doctest::Approx(rep.gamma_eff).epsilon(1e-12));
}

TEST_CASE("effective SINR saturates at 1/rho") {
    CHECK(effective_sinr(1e6, 0.01) == doctest::Approx(100.0).epsilon(0.01));
    CHECK(effective_sinr(1e6, 0.1) == doctest::Approx(10.0).epsilon(0.01));
    // rho = 0 passes gamma_id through unchanged.
    CHECK(effective_sinr(123.0, 0.0) == doctest::Approx(123.0).epsilon(1e-12));
}

TEST_CASE("mismatch energy is the squared Frobenius distance") {
    CMat a(2, 2);
    a << 1.0, 2.0, 3.0, 4.0;
    CMat b = a;
    b(0, 1) += std::complex<double>(0.0, 2.0);
    CHECK(mismatch_energy(a, b) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("QPSK analytic BER at known SINRs") {
    // P_b = Q(sqrt(gamma)) for Gray QPSK; Q(2) = 0.02275.
    CHECK(analytic_ber(4.0, 4) == doctest::Approx(0.0227501).epsilon(1e-4));
    CHECK(analytic_ber(0.0, 4) == doctest::Approx(0.5).epsilon(1e-9));
    // Monotone in gamma, increasing in order.
    CHECK(analytic_ber(10.0, 4) < analytic_ber(5.0, 4));
    CHECK(analytic_ber(10.0, 16) > analytic_ber(10.0, 4));
    CHECK(analytic_ber(10.0, 64) > analytic_ber(10.0, 16));
    CHECK_THROWS_AS((void)analytic_ber(10.0, 8), std::invalid_argument);
}

} // TEST_SUITE
