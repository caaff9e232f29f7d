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

#include <doctest.h>

#include "waveformlab/selector.hpp"

using namespace waveformlab;

TEST_SUITE("selector") {

TEST_CASE("cell grid is a lattice clipped to the disk") {
    const CellGrid grid = make_cell_grid(5, 500.0, 30.0);
    // 5x5 lattice over the bounding square; the four corners fall outside.
    CHECK(grid.positions.size() == 21);
    for (const auto &p : grid.positions) {
        CHECK(std::hypot(p.x_m, p.y_m) <= 500.0 + 1e-9);
    }
    CHECK(grid.ref_snr_db == doctest::Approx(30.0));
    CHECK(grid.cell_radius_m == doctest::Approx(500.0));
}

TEST_CASE("log-distance budget: doubling the distance costs 10.54 dB") {
    CellGrid grid;
    grid.ref_snr_db = 30.0;
    grid.ref_distance_m = 10.0;
    grid.pathloss_exponent = 3.5;
    grid.positions = {{100.0, 0.0}, {200.0, 0.0}, {0.0, 0.0}};
    const std::vector<double> g0 = gamma0_map(grid);
    REQUIRE(g0.size() == 3);
    const double drop = g0[0] - g0[1];
    CHECK(drop == doctest::Approx(35.0 * std::log10(2.0)).epsilon(1e-12));
    // Inside the reference distance the budget is clamped to ref_snr.
    CHECK(g0[2] == doctest::Approx(30.0).epsilon(1e-12));
    // At r = 100 m: 30 - 35 log10(10) = -5 dB.
    CHECK(g0[0] == doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("saturating SINR map at a hand-worked point") {
    CellGrid grid;
    grid.ref_snr_db = 20.0;
    grid.ref_distance_m = 10.0;
    grid.positions = {{10.0, 0.0}}; // gamma_0 = 20 dB exactly
    WaveformCellStats wf;
    wf.kind = WaveformKind::OFDM;
    wf.rho = 0.05;
    wf.eta = 1.0;
    const RateMap map = rate_map(grid, {wf}, 20e6, 1e-3);
    REQUIRE(map.points.size() == 1);
    REQUIRE(map.points[0].size() == 1);
    // gamma_eff = 100 / (1 + 5) = 16.67 -> 12.22 dB.
    CHECK(map.points[0][0].gamma_eff_db == doctest::Approx(12.218).epsilon(1e-3));
    CHECK(map.points[0][0].rate_continuous_bps ==
          doctest::Approx(20e6 * std::log2(1.0 + 100.0 / 6.0)).epsilon(1e-9));
    // 16.67 clears QPSK (9.55) but not 16-QAM.
    CHECK(map.points[0][0].m_star == 4);
    CHECK(map.points[0][0].rate_discrete_bps == doctest::Approx(40e6));
}

TEST_CASE("zero leakage passes the link budget through") {
    CellGrid grid;
    grid.ref_snr_db = 40.0;
    grid.positions = {{10.0, 0.0}};
    WaveformCellStats wf;
    wf.rho = 0.0;
    wf.eta = 0.5;
    const RateMap map = rate_map(grid, {wf}, 10e6, 1e-3);
    CHECK(map.points[0][0].gamma_eff_db == doctest::Approx(40.0).epsilon(1e-9));
    // 40 dB supports 256-QAM: 10 MHz * 0.5 * 8 bits.
    CHECK(map.points[0][0].m_star == 256);
    CHECK(map.points[0][0].rate_discrete_bps == doctest::Approx(40e6));
}

TEST_CASE("winners favour the higher discrete rate with stable ties") {
    CellGrid grid;
    grid.ref_snr_db = 25.0;
    grid.positions = {{10.0, 0.0}};
    WaveformCellStats low_rho;  // clean but heavy overhead
    low_rho.kind = WaveformKind::OTFS;
    low_rho.rho = 0.0;
    low_rho.eta = 0.6;
    WaveformCellStats high_rho; // light overhead, leaky
    high_rho.kind = WaveformKind::OFDM;
    high_rho.rho = 0.08;
    high_rho.eta = 0.9;
    const RateMap map = rate_map(grid, {low_rho, high_rho}, 20e6, 1e-3);
    REQUIRE(map.winner.size() == 1);
    // The clean waveform passes 25 dB straight through (64-QAM) while the
    // leaky one saturates at 1/0.08 -> ~11 dB (QPSK only), so the heavy
    // overhead still wins on discrete rate: 0.6 * 6 > 0.9 * 2.
    CHECK(map.points[0][0].m_star == 64);
    CHECK(map.points[1][0].m_star == 4);
    CHECK(map.winner[0] == 0);

    // Identical stats tie; the first declared waveform keeps the cell.
    const RateMap tie = rate_map(grid, {low_rho, low_rho}, 20e6, 1e-3);
    CHECK(tie.winner[0] == 0);
}

TEST_CASE("ranking orders by mean rate and reports coverage area") {
    CellGrid grid;
    grid.ref_snr_db = 30.0;
    grid.positions = {{10.0, 0.0}, {50.0, 0.0}, {400.0, 0.0}};
    WaveformCellStats a;
    a.kind = WaveformKind::AFDM;
    a.rho = 0.0;
    a.eta = 0.8;
    WaveformCellStats b;
    b.kind = WaveformKind::OFDM;
    b.rho = 0.5; // floored at 3 dB: below every QPSK operating point
    b.eta = 0.9;
    const RateMap map = rate_map(grid, {a, b}, 20e6, 1e-3);
    const WaveformRanking rank = rank_waveforms(map, 2.0 * 20e6);
    REQUIRE(rank.ordered.size() == 2);
    CHECK(rank.ordered[0].kind == WaveformKind::AFDM);
    CHECK(rank.ordered[0].mean_rate_bps > rank.ordered[1].mean_rate_bps);
    CHECK(rank.ordered[1].mean_rate_bps == doctest::Approx(0.0));
    CHECK(rank.ordered[1].high_rate_area == doctest::Approx(0.0));
    CHECK(rank.ordered[0].wins == 3);
    // high_rate_area is a fraction of grid positions.
    CHECK(rank.ordered[0].high_rate_area >= 0.0);
    CHECK(rank.ordered[0].high_rate_area <= 1.0);
}

} // TEST_SUITE
