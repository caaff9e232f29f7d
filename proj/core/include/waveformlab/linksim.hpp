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
#include <functional>
#include <optional>
#include <vector>

#include "waveformlab/metrics.hpp"
#include "waveformlab/sparse_oracle.hpp"

namespace waveformlab {

// =========================================================================
// Modulation
// =========================================================================

// Gray-mapped square M-QAM, M in {4, 16, 64, 256}, unit average symbol
// energy. bits.size() must be a multiple of log2(M).
CVec modulate(const std::vector<int> &bits, int modulation_order);

// Hard nearest-neighbour decisions back to bits.
std::vector<int> demodulate(const CVec &symbols, int modulation_order);

// Nearest constellation points (used by decision-feedback stages).
CVec slice_symbols(const CVec &estimates, int modulation_order);

std::vector<int> random_bits(Pcg32 &rng, int count);

// =========================================================================
// Equalizers
// =========================================================================

enum class Equalizer { MMSE, MRC, MRC_SIC };

// x_hat = (H^H H + sigma^2 I)^{-1} H^H y; at sigma^2 = 0 a rank-revealing
// pseudo-inverse solve is used instead.
CVec equalize_mmse(const CMat &h_eff, const CVec &y, double noise_var);

// Per-symbol matched-filter combining, x_hat[n] = (H^H y)[n] / ||col_n||^2.
// Columns with zero norm cannot carry a decision; their indices are reported
// through `unrecoverable` (estimate forced to 0) when the pointer is given.
CVec equalize_mrc(const CMat &h_eff, const CVec &y,
                  std::vector<int> *unrecoverable = nullptr);

// Matched-filter-initialized iterative refinement: conjugate-gradient
// iterations on the regularized normal equations (the first iterate is the
// MRC statistic), followed by a few hard-decision interference-cancellation
// sweeps. This is the multi-branch combiner used for waveforms whose
// effective channel carries several resolvable taps per symbol.
CVec equalize_mrc_sic(const CMat &h_eff, const CVec &y, double noise_var,
                      int modulation_order, int sic_rounds = 3);

// =========================================================================
// Channel estimation
// =========================================================================

struct ChannelEstimate {
    CMat h_eff_hat;
    double nmse = 0.0;      // ||H - H_hat||_F^2 / ||H||_F^2
    bool empty = false;     // no taps above threshold (impulse-pilot path)
    int taps_detected = 0;  // impulse-pilot path only
};

// Simplified pilot-based estimation of H_eff from one pilot transmission at
// the given noise level.
//  - AFDM/OTFS: embedded unit impulse pilot; taps are read off the response
//    wherever it exceeds 3x the guard-bin noise floor, then the estimate is
//    rebuilt through the sparse closed form.
//  - OFDM/DFT-s-OFDM: comb pilots every `pilot_spacing` tones, per-tone
//    least squares on the diagonal, circular linear interpolation between
//    pilot tones.
ChannelEstimate estimate_channel_simple(const CMat &h_eff_true,
                                        const WaveformSpec &spec,
                                        double noise_var, Pcg32 &rng,
                                        int pilot_spacing = 4);

// =========================================================================
// Monte Carlo link simulation
// =========================================================================

enum class CsiMode { perfect, estimated };
enum class Regime { sparse, proposed };

// Per-trial realization source. `sparse` enforces the downscale premise:
// one region, one ray per cluster, delays/Dopplers rounded to the grid.
struct ChannelSource {
    ChannelConfig config;
    Regime regime = Regime::proposed;
    std::uint64_t seed = 1;
};

ChannelRealization draw_channel(const ChannelSource &source,
                                std::uint64_t substream);

struct LinkConfig {
    WaveformSpec waveform;
    int modulation_order = 4;
    std::vector<double> snr_grid_db = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
    int num_trials = 1000; // cap per SNR point
    Equalizer equalizer = Equalizer::MMSE;
    CsiMode csi = CsiMode::perfect;
    int pilot_spacing = 4;
    double target_ber = 1e-3;
    int min_errors = 100; // early stop once reached (batch granularity)
    int num_threads = 1;
};

struct SnrPointReport {
    double snr_db = 0.0;
    double ber_mc = 0.0;
    double ber_ci_low = 0.0;  // 95% normal-approximation interval
    double ber_ci_high = 0.0;
    double ber_analytic = 0.0;
    long long bit_errors = 0;
    long long bits = 0;
    int trials = 0;
    double nmse_ce = 0.0; // mean over trials (estimated CSI only)
};

struct LinkReport {
    std::vector<SnrPointReport> rows;
    double rho_mean = 0.0; // structural leakage ratio used for ber_analytic
};

// Runs the Monte Carlo BER sweep. Trials are independent, keyed by
// (seed, snr index, trial index), executed in fixed-size batches so results
// are bit-identical for any thread count.
LinkReport run_ber(const LinkConfig &link, const ChannelSource &source);

// Ensemble-mean structural interference ratio. With perfect CSI this is the
// leakage split against the integer-grid ideal, rho = gamma_leak / gamma_sig.
// With estimated CSI it is receiver-centric: the equalizer trusts the
// (noiseless) pilot estimate, so rho = ||H_eff - H_hat||^2 / ||H_hat||^2 —
// everything the estimator's structure cannot express becomes residual
// interference.
double mean_rho(const ChannelSource &source, const WaveformSpec &waveform,
                CsiMode csi, int ensemble_size, int pilot_spacing = 4,
                IdealRef ideal = IdealRef::region0);

// =========================================================================
// PAPR and spectral efficiency
// =========================================================================

// Time-domain synthesis A^H x, computed with FFTs (no kernel matrix).
CVec apply_kernel_adjoint(const WaveformSpec &spec, const CVec &symbols);

// PAPR in dB of one frame, with zero-padded FFT interpolation by
// `oversample`.
double papr_db(const WaveformSpec &spec, const CVec &symbols, int oversample);

struct PaprCcdfPoint {
    double threshold_db = 0.0;
    double prob = 0.0;
};

// CCDF of PAPR over random QAM frames at the given thresholds.
std::vector<PaprCcdfPoint> measure_papr(const WaveformSpec &spec,
                                        int modulation_order, int num_frames,
                                        int oversample, std::uint64_t seed,
                                        const std::vector<double> &thresholds_db,
                                        int num_threads = 1);

// Payload fraction after CP, pilot, and guard overhead.
double overhead_eta(const WaveformSpec &spec, double l_max, double k_max,
                    int pilot_spacing = 4);

// eta * log2(M*) with M* the largest supported order meeting the BER target
// at gamma_eff; 0 when even QPSK misses the target.
double spectral_efficiency(double gamma_eff, double target_ber,
                           double overhead_eta);

} // namespace waveformlab
