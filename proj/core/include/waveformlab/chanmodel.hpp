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

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "waveformlab/rng.hpp"

namespace waveformlab {

// Free-space propagation speed used for Doppler and delay-drift scaling.
inline constexpr double kSpeedOfLight = 3.0e8;

// =========================================================================
// Configuration
// =========================================================================

// Stochastic geometry of one doubly dispersive channel draw. Defaults mirror
// a 3.5 GHz / 20 MHz mobile operating point; the purely statistical knobs
// (shadowing, angular concentration, ray survival) have no authoritative
// published values and are exposed here as plain parameters.
struct ChannelConfig {
    double carrier_freq_hz = 3.5e9;         // f_c
    double bandwidth_hz = 20.0e6;           // B
    int frame_len = 64;                     // N, samples per frame
    int num_regions = 1;                    // stationarity regions per frame
    double cluster_rate = 12.0;             // Poisson rate of cluster count
    double ray_rate = 12.0;                 // Poisson rate of rays per cluster
    double max_excess_delay_s = 0.5e-6;     // tau_max
    double rms_delay_spread_s = 0.1e-6;     // tau_RMS of the exponential PDP
    double shadow_std_db = 3.0;             // per-cluster lognormal shadowing
    double speed_mps = 33.3333333333333336; // terminal speed (120 km/h)
    double velocity_azimuth_rad = 0.0;      // direction of motion
    double cluster_sector_width_rad = 6.283185307179586476925286766559; // 2*pi
    double vonmises_kappa = 0.0;            // angular concentration per cluster
    double survival_prob = 1.0;             // per-ray persistence across regions
    std::uint64_t rng_seed = 1;

    // Throws std::invalid_argument on violated invariants (non-positive
    // bandwidth, frame too short, delays not representable on the grid, ...).
    void validate() const;
};

// Maximum Doppler shift f_D = (v / c0) * f_c.
double doppler_max_hz(const ChannelConfig &config);

// Frame duration T = N / B.
double frame_duration_s(const ChannelConfig &config);

// =========================================================================
// Realization data
// =========================================================================

struct Ray {
    std::complex<double> gain;    // h_{c,r}
    double power_fraction = 0.0;  // w_{c,r}, sums to 1 over the cluster
    double phase_rad = 0.0;       // phase of gain, in [0, 2*pi)
    double azimuth_rad = 0.0;     // arrival angle
    double doppler_hz = 0.0;      // nu = f_D cos(azimuth - velocity azimuth)
    double doppler_norm_total = 0.0; // k_tot = T * nu
    double delay_offset_norm = 0.0;  // fractional delay in (-1/2, 1/2]
};

struct Cluster {
    double power = 0.0;             // P_c, sums to 1 over clusters
    double delay_s = 0.0;           // tau_c
    double delay_norm_total = 0.0;  // l_tot = tau_c * B (plus drift per region)
    double delay_drift = 0.0;       // beta_c = radial speed / c0
    double mean_azimuth_rad = 0.0;  // sector centre
    double sector_width_rad = 0.0;  // angular sector width
    std::vector<Ray> rays;
};

struct StationarityRegion {
    int index = 0;
    int sample_begin = 0; // half-open sample range [sample_begin, sample_end)
    int sample_end = 0;
    std::vector<Cluster> clusters;
};

struct ChannelRealization {
    ChannelConfig config;
    std::vector<StationarityRegion> regions;
    std::vector<double> shadowing_db; // X_c, one per cluster, shared by regions
};

// =========================================================================
// Sampling operations
// =========================================================================
// All operations consume the passed stream sequentially, so one (seed,
// config) pair yields one bit-exact realization on every platform.

// Poisson cluster/ray counts, both clamped to >= 1 so no realization is
// empty.
std::pair<int, std::vector<int>> sample_counts(const ChannelConfig &config,
                                               Pcg32 &rng);

// Shadowed exponential power-delay profile, normalized to sum 1:
// P_c ∝ exp(-tau_c / tau_RMS) * 10^(X_c / 10), X_c ~ N(0, shadow_std_db^2).
// When shadowing_db_out is non-null it receives the raw X_c draws.
std::vector<double> draw_cluster_powers(const std::vector<double> &delays_s,
                                        const ChannelConfig &config, Pcg32 &rng,
                                        std::vector<double> *shadowing_db_out = nullptr);

// One ray-gain draw: raw exponential weight (kept for birth–death re-splits),
// normalized power fraction, uniform phase, and the resulting complex gain
// sqrt(P_c * w) * exp(j*phase).
struct RayGainDraw {
    std::complex<double> gain;
    double power_fraction = 0.0;
    double phase_rad = 0.0;
    double raw_weight = 0.0;
};

std::vector<RayGainDraw> draw_ray_gains(double cluster_power, int ray_count,
                                        Pcg32 &rng);

// One angle/Doppler draw: azimuth from a von Mises law truncated to the
// cluster sector, Doppler nu = f_D cos(azimuth - velocity azimuth).
struct DopplerDraw {
    double azimuth_rad = 0.0;
    double doppler_hz = 0.0;
};

std::vector<DopplerDraw> draw_doppler(const ChannelConfig &config,
                                      double mean_azimuth_rad,
                                      double sector_width_rad, int count,
                                      Pcg32 &rng);

// Full generative pipeline: partitions [0, N) into equal-length regions
// (remainder to the last), draws region 0 fresh, then evolves rays across
// region boundaries by per-ray Bernoulli survival plus Poisson-distributed
// fresh births, and drifts cluster delays by beta_c * B * T_region.
ChannelRealization segment_regions(const ChannelConfig &config, Pcg32 &rng);

// Convenience wrapper seeding the stream from config.rng_seed.
ChannelRealization generate_realization(const ChannelConfig &config);

} // namespace waveformlab
