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

#include "waveformlab/operators.hpp"

namespace waveformlab {

// =========================================================================
// Resolvability / regime indicators
// =========================================================================

struct RegimeIndicators {
    double doppler_max_hz = 0.0;    // f_D
    double doppler_spread_hz = 0.0; // max pairwise Doppler distance in a sector
    double chi_tau = 0.0;           // B * tau_max (= l_max, delay resolvability)
    double chi_nu = 0.0;            // f_D * T (= k_max, Doppler resolvability)
    double chi_stat = 0.0;          // T / T_stat (local stationarity)
    double delta_l_sym = 0.0;       // B * (v / c0) * T, delay drift per symbol
};

// T = 1 / delta_f. Speed may be zero; every other argument must be positive.
// The sector width enters only the Doppler spread (chord length, saturating
// at the diameter 2 f_D for sectors wider than a half circle).
RegimeIndicators regime_indicators(double v_mps, double carrier_freq_hz,
                                   double bandwidth_hz, double delta_f_hz,
                                   double tau_max_s, double t_stat_s,
                                   double sector_width_rad = 6.283185307179586476925286766559);

// =========================================================================
// Leakage decomposition and effective SINR
// =========================================================================

struct LeakageReport {
    double gamma_sig = 0.0;  // signal power through the ideal part
    double gamma_leak = 0.0; // power through the residual interference
    double gamma_mm = 0.0;   // symbol-domain reconstruction mismatch power
    double gamma_id = 0.0;   // gamma_sig / noise power
    double rho = 0.0;        // (gamma_leak + gamma_mm) / gamma_sig
    double gamma_eff = 0.0;  // gamma_sig / (noise + leak + mismatch)
};

// Signal/leakage split for i.i.d. unit-covariance symbols scaled to
// symbol_energy: E||A x||^2 = ||A||_F^2 * E_s / N_dim evaluated in closed
// form. Fills gamma_sig and gamma_leak; the remaining fields are completed
// by finalize_report.
LeakageReport leakage_split(const CMat &h_eff, const CMat &h_id,
                            double symbol_energy);

// Squared Frobenius norm of (H_eff - H_eff_hat).
double mismatch_energy(const CMat &h_eff, const CMat &h_eff_hat);

// Folds the symbol-domain mismatch power and the noise variance into the
// partial split, producing rho, gamma_id, and gamma_eff.
LeakageReport finalize_report(LeakageReport partial, double gamma_mm,
                              double noise_var);

// gamma_eff = gamma_id / (1 + rho * gamma_id); saturates at 1/rho.
double effective_sinr(double gamma_id, double rho);

// Gray-mapped square M-QAM bit error probability,
// P_b = a_M Q(sqrt(b_M gamma_eff)), M in {4, 16, 64, 256}.
double analytic_ber(double gamma_eff, int modulation_order);

// =========================================================================
// Mobility operating-point table
// =========================================================================

// One speed row of the dense-urban operating-point table (f_c = 3.5 GHz,
// tau_max = 0.5 us, B in {20, 100} MHz, delta_f in {500 Hz, 60 kHz}).
struct Table1Row {
    double speed_kmh = 0.0;
    double f_d_hz = 0.0;
    double l_max_b20 = 0.0;
    double l_max_b100 = 0.0;
    double k_max_df500 = 0.0;
    double k_max_df60k = 0.0;
    double delta_l_sym_df500_b20 = 0.0;
    double delta_l_sym_df500_b100 = 0.0;
    double delta_l_sym_df60k_b20 = 0.0;
    double delta_l_sym_df60k_b100 = 0.0;
};

// Recomputes the table from the indicator formulas (speeds 30/120/300 km/h).
std::vector<Table1Row> table1_rows();

} // namespace waveformlab
