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

#include <vector>

#include "waveformlab/transforms.hpp"

namespace waveformlab {

// =========================================================================
// Cell geometry and link budget
// =========================================================================

struct CellPosition {
    double x_m = 0.0;
    double y_m = 0.0;
};

struct CellGrid {
    std::vector<CellPosition> positions;
    double ref_snr_db = 30.0;     // SNR at the reference distance
    double ref_distance_m = 10.0; // positions closer than this are clamped
    double pathloss_exponent = 3.5;
    double cell_radius_m = 500.0;
};

// Uniform square lattice clipped to the cell disk, `per_axis` points across
// the diameter.
CellGrid make_cell_grid(int per_axis, double cell_radius_m,
                        double ref_snr_db);

// Log-distance link budget: gamma_0(r) in dB for every grid position.
std::vector<double> gamma0_map(const CellGrid &grid);

// =========================================================================
// Rate maps and ranking
// =========================================================================

// Per-waveform inputs to the map: the ensemble leakage ratio and the payload
// fraction after overhead.
struct WaveformCellStats {
    WaveformKind kind = WaveformKind::OFDM;
    double rho = 0.0;
    double eta = 1.0;
};

struct RatePoint {
    double gamma_eff_db = 0.0;
    double rate_continuous_bps = 0.0; // B log2(1 + gamma_eff)
    double rate_discrete_bps = 0.0;   // B eta log2(M*)
    int m_star = 0;                   // 0 when even QPSK misses the target
};

struct RateMap {
    CellGrid grid;
    std::vector<double> gamma0_db;            // per position
    std::vector<WaveformCellStats> waveforms; // column order of `points`
    std::vector<std::vector<RatePoint>> points; // [waveform][position]
    std::vector<int> winner; // per position, index into `waveforms`
};

// Saturating SINR map gamma_eff = gamma_0 / (1 + rho gamma_0) evaluated over
// the cell for each candidate waveform. Winners are decided on the discrete
// rate; ties fall back to waveform declaration order.
RateMap rate_map(const CellGrid &grid,
                 const std::vector<WaveformCellStats> &waveforms,
                 double bandwidth_hz, double target_ber);

struct WaveformRank {
    WaveformKind kind = WaveformKind::OFDM;
    double mean_rate_bps = 0.0;
    double high_rate_area = 0.0; // fraction of positions at/above threshold
    int wins = 0;                // positions where this waveform is best
};

struct WaveformRanking {
    std::vector<WaveformRank> ordered; // descending mean rate
};

// Ranks the candidates by cell-mean discrete rate (ties broken by
// declaration order). `high_rate_threshold_bps` defines the coverage-area
// statistic.
WaveformRanking rank_waveforms(const RateMap &map,
                               double high_rate_threshold_bps);

} // namespace waveformlab
