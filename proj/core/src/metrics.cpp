// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "waveformlab/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace waveformlab {

namespace {

double q_function(double x) {
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

} // namespace

RegimeIndicators regime_indicators(double v_mps, double carrier_freq_hz,
                                   double bandwidth_hz, double delta_f_hz,
                                   double tau_max_s, double t_stat_s,
                                   double sector_width_rad) {
    if (v_mps < 0.0) {
        throw std::invalid_argument("regime_indicators: speed must be >= 0");
    }
    if (!(carrier_freq_hz > 0.0) || !(bandwidth_hz > 0.0) ||
        !(delta_f_hz > 0.0) || !(tau_max_s > 0.0) || !(t_stat_s > 0.0)) {
        throw std::invalid_argument(
            "regime_indicators: carrier, bandwidth, subcarrier spacing, "
            "tau_max, and t_stat must all be > 0");
    }
    if (sector_width_rad < 0.0) {
        throw std::invalid_argument(
            "regime_indicators: sector width must be >= 0");
    }
    const double t_sym = 1.0 / delta_f_hz;
    const double f_d = v_mps / kSpeedOfLight * carrier_freq_hz;

    RegimeIndicators ind;
    ind.doppler_max_hz = f_d;
    // Max pairwise distance of f_D cos(theta) over a sector: chord length,
    // capped at the diameter once the sector exceeds a half circle.
    const double half = std::min(sector_width_rad, std::numbers::pi) / 2.0;
    ind.doppler_spread_hz = 2.0 * f_d * std::sin(half);
    ind.chi_tau = bandwidth_hz * tau_max_s;
    ind.chi_nu = f_d * t_sym;
    ind.chi_stat = t_sym / t_stat_s;
    ind.delta_l_sym = bandwidth_hz * (v_mps / kSpeedOfLight) * t_sym;
    return ind;
}

LeakageReport leakage_split(const CMat &h_eff, const CMat &h_id,
                            double symbol_energy) {
    if (h_eff.rows() != h_id.rows() || h_eff.cols() != h_id.cols()) {
        throw std::invalid_argument("leakage_split: dimension mismatch");
    }
    const double n_dim = static_cast<double>(h_eff.cols());
    LeakageReport report;
    report.gamma_sig = h_id.squaredNorm() * symbol_energy / n_dim;
    report.gamma_leak = (h_eff - h_id).squaredNorm() * symbol_energy / n_dim;
    return report;
}

double mismatch_energy(const CMat &h_eff, const CMat &h_eff_hat) {
    if (h_eff.rows() != h_eff_hat.rows() || h_eff.cols() != h_eff_hat.cols()) {
        throw std::invalid_argument("mismatch_energy: dimension mismatch");
    }
    return (h_eff - h_eff_hat).squaredNorm();
}

LeakageReport finalize_report(LeakageReport partial, double gamma_mm,
                              double noise_var) {
    if (gamma_mm < 0.0 || noise_var < 0.0) {
        throw std::invalid_argument(
            "finalize_report: gamma_mm and noise_var must be >= 0");
    }
    partial.gamma_mm = gamma_mm;
    partial.gamma_id = noise_var > 0.0
                           ? partial.gamma_sig / noise_var
                           : std::numeric_limits<double>::infinity();
    partial.rho = partial.gamma_sig > 0.0
                      ? (partial.gamma_leak + gamma_mm) / partial.gamma_sig
                      : 0.0;
    partial.gamma_eff =
        partial.gamma_sig / (noise_var + partial.gamma_leak + gamma_mm);
    return partial;
}

double effective_sinr(double gamma_id, double rho) {
    if (gamma_id < 0.0 || rho < 0.0) {
        throw std::invalid_argument(
            "effective_sinr: gamma_id and rho must be >= 0");
    }
    if (std::isinf(gamma_id)) {
        return rho > 0.0 ? 1.0 / rho
                         : std::numeric_limits<double>::infinity();
    }
    return gamma_id / (1.0 + rho * gamma_id);
}

double analytic_ber(double gamma_eff, int modulation_order) {
    if (modulation_order != 4 && modulation_order != 16 &&
        modulation_order != 64 && modulation_order != 256) {
        throw std::invalid_argument(
            "analytic_ber: modulation order must be one of 4, 16, 64, 256");
    }
    if (gamma_eff < 0.0) {
        throw std::invalid_argument("analytic_ber: gamma_eff must be >= 0");
    }
    const double m = static_cast<double>(modulation_order);
    const double bits = std::log2(m);
    const double a_m = 4.0 / bits * (1.0 - 1.0 / std::sqrt(m));
    const double b_m = 3.0 / (m - 1.0);
    return a_m * q_function(std::sqrt(b_m * gamma_eff));
}

std::vector<Table1Row> table1_rows() {
    constexpr double kCarrier = 3.5e9;
    constexpr double kTauMax = 0.5e-6;
    const double speeds_kmh[] = {30.0, 120.0, 300.0};
    // t_stat only enters chi_stat, which the table does not report.
    constexpr double kTStat = 1.0;

    std::vector<Table1Row> rows;
    rows.reserve(3);
    for (double kmh : speeds_kmh) {
        const double v = kmh / 3.6;
        const auto b20_df500 =
            regime_indicators(v, kCarrier, 20.0e6, 500.0, kTauMax, kTStat);
        const auto b100_df500 =
            regime_indicators(v, kCarrier, 100.0e6, 500.0, kTauMax, kTStat);
        const auto b20_df60k =
            regime_indicators(v, kCarrier, 20.0e6, 60.0e3, kTauMax, kTStat);
        const auto b100_df60k =
            regime_indicators(v, kCarrier, 100.0e6, 60.0e3, kTauMax, kTStat);

        Table1Row row;
        row.speed_kmh = kmh;
        row.f_d_hz = b20_df500.doppler_max_hz;
        row.l_max_b20 = b20_df500.chi_tau;
        row.l_max_b100 = b100_df500.chi_tau;
        row.k_max_df500 = b20_df500.chi_nu;
        row.k_max_df60k = b20_df60k.chi_nu;
        row.delta_l_sym_df500_b20 = b20_df500.delta_l_sym;
        row.delta_l_sym_df500_b100 = b100_df500.delta_l_sym;
        row.delta_l_sym_df60k_b20 = b20_df60k.delta_l_sym;
        row.delta_l_sym_df60k_b100 = b100_df60k.delta_l_sym;
        rows.push_back(row);
    }
    return rows;
}

} // namespace waveformlab
