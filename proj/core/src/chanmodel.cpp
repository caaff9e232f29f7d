// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "waveformlab/chanmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace waveformlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Stream tags: every stochastic stage of the pipeline runs on its own
// decorrelated substream so stages can be reordered or parallelized without
// perturbing each other.
enum StreamTag : std::uint64_t {
    kTagCounts = 0x01,
    kTagGeometry = 0x02, // delays, shadowing, sector centres
    kTagCluster = 0x03,  // per-(region, cluster) ray churn
};

Pcg32 make_stream(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t key = mix_key(seed, tag);
    return Pcg32(key, tag);
}

Pcg32 make_cluster_stream(std::uint64_t seed, int region, int cluster) {
    std::uint64_t key = mix_key(seed, kTagCluster);
    key = mix_key(key, static_cast<std::uint64_t>(region));
    key = mix_key(key, static_cast<std::uint64_t>(cluster));
    return Pcg32(key, kTagCluster);
}

// Fractional part in (-1/2, 1/2]: x - ceil(x - 1/2).
double centered_frac(double x) {
    return x - std::ceil(x - 0.5);
}

// Internal mutable ray state carried across region boundaries. Survivors
// keep raw weight, phase, angle, and Doppler; only the normalized power
// split changes when the ray set churns.
struct RayState {
    double raw_weight = 0.0;
    double phase_rad = 0.0;
    double azimuth_rad = 0.0;
    double doppler_hz = 0.0;
};

RayState fresh_ray(const ChannelConfig &config, double mean_azimuth,
                   double sector_width, Pcg32 &rng) {
    RayState state;
    state.raw_weight = sample_exponential(rng);
    state.phase_rad = kTwoPi * rng.next_double();
    state.azimuth_rad = sample_von_mises_sector(
        rng, mean_azimuth, config.vonmises_kappa, sector_width);
    state.doppler_hz = doppler_max_hz(config) *
                       std::cos(state.azimuth_rad - config.velocity_azimuth_rad);
    return state;
}

// Finalizes one cluster for one region: normalizes the raw weights to power
// fractions and materializes the Ray records.
Cluster finalize_cluster(const ChannelConfig &config, double power,
                         double delay_s, double l_tot, double drift,
                         double mean_azimuth, double sector_width,
                         const std::vector<RayState> &states) {
    Cluster cluster;
    cluster.power = power;
    cluster.delay_s = delay_s;
    cluster.delay_norm_total = l_tot;
    cluster.delay_drift = drift;
    cluster.mean_azimuth_rad = mean_azimuth;
    cluster.sector_width_rad = sector_width;

    double weight_sum = 0.0;
    for (const auto &s : states) {
        weight_sum += s.raw_weight;
    }
    const double frame_t = frame_duration_s(config);
    const double offset = centered_frac(l_tot);
    cluster.rays.reserve(states.size());
    for (const auto &s : states) {
        Ray ray;
        ray.power_fraction = s.raw_weight / weight_sum;
        ray.phase_rad = s.phase_rad;
        ray.azimuth_rad = s.azimuth_rad;
        ray.doppler_hz = s.doppler_hz;
        ray.doppler_norm_total = frame_t * s.doppler_hz;
        ray.delay_offset_norm = offset;
        ray.gain = std::polar(std::sqrt(power * ray.power_fraction),
                              s.phase_rad);
        cluster.rays.push_back(ray);
    }
    return cluster;
}

} // namespace

void ChannelConfig::validate() const {
    if (!(bandwidth_hz > 0.0)) {
        throw std::invalid_argument("ChannelConfig: bandwidth_hz must be > 0");
    }
    if (frame_len < 2) {
        throw std::invalid_argument("ChannelConfig: frame_len must be >= 2");
    }
    if (num_regions < 1) {
        throw std::invalid_argument("ChannelConfig: num_regions must be >= 1");
    }
    if (num_regions > frame_len) {
        throw std::invalid_argument(
            "ChannelConfig: num_regions must not exceed frame_len");
    }
    if (!(max_excess_delay_s * bandwidth_hz < static_cast<double>(frame_len))) {
        throw std::invalid_argument(
            "ChannelConfig: max_excess_delay_s * bandwidth_hz must be < frame_len");
    }
    if (!(rms_delay_spread_s > 0.0)) {
        throw std::invalid_argument(
            "ChannelConfig: rms_delay_spread_s must be > 0");
    }
    if (cluster_rate < 0.0 || ray_rate < 0.0) {
        throw std::invalid_argument(
            "ChannelConfig: cluster_rate and ray_rate must be >= 0");
    }
    if (shadow_std_db < 0.0) {
        throw std::invalid_argument("ChannelConfig: shadow_std_db must be >= 0");
    }
    if (speed_mps < 0.0) {
        throw std::invalid_argument("ChannelConfig: speed_mps must be >= 0");
    }
    if (vonmises_kappa < 0.0) {
        throw std::invalid_argument("ChannelConfig: vonmises_kappa must be >= 0");
    }
    if (cluster_sector_width_rad <= 0.0 ||
        cluster_sector_width_rad > kTwoPi + 1e-12) {
        throw std::invalid_argument(
            "ChannelConfig: cluster_sector_width_rad must lie in (0, 2*pi]");
    }
    if (survival_prob < 0.0 || survival_prob > 1.0) {
        throw std::invalid_argument(
            "ChannelConfig: survival_prob must lie in [0, 1]");
    }
}

double doppler_max_hz(const ChannelConfig &config) {
    return config.speed_mps / kSpeedOfLight * config.carrier_freq_hz;
}

double frame_duration_s(const ChannelConfig &config) {
    return static_cast<double>(config.frame_len) / config.bandwidth_hz;
}

std::pair<int, std::vector<int>> sample_counts(const ChannelConfig &config,
                                               Pcg32 &rng) {
    if (config.cluster_rate < 0.0 || config.ray_rate < 0.0) {
        throw std::invalid_argument("sample_counts: rates must be >= 0");
    }
    int clusters = std::max(1, sample_poisson(rng, config.cluster_rate));
    std::vector<int> rays(static_cast<std::size_t>(clusters));
    for (auto &r : rays) {
        r = std::max(1, sample_poisson(rng, config.ray_rate));
    }
    return {clusters, rays};
}

std::vector<double> draw_cluster_powers(const std::vector<double> &delays_s,
                                        const ChannelConfig &config, Pcg32 &rng,
                                        std::vector<double> *shadowing_db_out) {
    if (delays_s.empty()) {
        throw std::invalid_argument("draw_cluster_powers: delays must be nonempty");
    }
    if (!(config.rms_delay_spread_s > 0.0)) {
        throw std::invalid_argument(
            "draw_cluster_powers: rms_delay_spread_s must be > 0");
    }
    std::vector<double> shadow(delays_s.size(), 0.0);
    for (auto &x : shadow) {
        x = config.shadow_std_db * sample_normal(rng);
    }
    std::vector<double> powers(delays_s.size());
    double sum = 0.0;
    for (std::size_t c = 0; c < delays_s.size(); ++c) {
        powers[c] = std::exp(-delays_s[c] / config.rms_delay_spread_s) *
                    std::pow(10.0, shadow[c] / 10.0);
        sum += powers[c];
    }
    for (auto &p : powers) {
        p /= sum;
    }
    if (shadowing_db_out != nullptr) {
        *shadowing_db_out = std::move(shadow);
    }
    return powers;
}

std::vector<RayGainDraw> draw_ray_gains(double cluster_power, int ray_count,
                                        Pcg32 &rng) {
    if (!(cluster_power > 0.0) || cluster_power > 1.0 + 1e-12) {
        throw std::invalid_argument(
            "draw_ray_gains: cluster_power must lie in (0, 1]");
    }
    if (ray_count < 1) {
        throw std::invalid_argument("draw_ray_gains: ray_count must be >= 1");
    }
    std::vector<RayGainDraw> draws(static_cast<std::size_t>(ray_count));
    double weight_sum = 0.0;
    for (auto &d : draws) {
        d.raw_weight = sample_exponential(rng);
        d.phase_rad = kTwoPi * rng.next_double();
        weight_sum += d.raw_weight;
    }
    for (auto &d : draws) {
        d.power_fraction = d.raw_weight / weight_sum;
        d.gain = std::polar(std::sqrt(cluster_power * d.power_fraction),
                            d.phase_rad);
    }
    return draws;
}

std::vector<DopplerDraw> draw_doppler(const ChannelConfig &config,
                                      double mean_azimuth_rad,
                                      double sector_width_rad, int count,
                                      Pcg32 &rng) {
    if (config.speed_mps < 0.0) {
        throw std::invalid_argument("draw_doppler: speed must be >= 0");
    }
    if (config.vonmises_kappa < 0.0) {
        throw std::invalid_argument("draw_doppler: kappa must be >= 0");
    }
    const double f_d = doppler_max_hz(config);
    std::vector<DopplerDraw> draws(static_cast<std::size_t>(std::max(count, 0)));
    for (auto &d : draws) {
        d.azimuth_rad = sample_von_mises_sector(
            rng, mean_azimuth_rad, config.vonmises_kappa, sector_width_rad);
        d.doppler_hz = f_d * std::cos(d.azimuth_rad - config.velocity_azimuth_rad);
    }
    return draws;
}

ChannelRealization segment_regions(const ChannelConfig &config, Pcg32 &rng) {
    config.validate();
    const std::uint64_t seed = rng.next_u64(); // derive all substreams from here
    const int n = config.frame_len;
    const int num_regions = config.num_regions;

    ChannelRealization realization;
    realization.config = config;

    // --- counts ---------------------------------------------------------
    Pcg32 counts_rng = make_stream(seed, kTagCounts);
    auto [cluster_count, ray_counts] = sample_counts(config, counts_rng);

    // --- static cluster geometry -----------------------------------------
    // Delays are ordered uniforms on [0, tau_max] (Poisson arrivals given
    // the count); shadowing, powers, sector centres, and drift are drawn
    // once and persist across regions.
    Pcg32 geom_rng = make_stream(seed, kTagGeometry);
    std::vector<double> delays_s(static_cast<std::size_t>(cluster_count));
    for (auto &d : delays_s) {
        d = config.max_excess_delay_s * geom_rng.next_double();
    }
    std::sort(delays_s.begin(), delays_s.end());
    std::vector<double> powers =
        draw_cluster_powers(delays_s, config, geom_rng, &realization.shadowing_db);
    std::vector<double> mean_azimuths(delays_s.size());
    for (auto &a : mean_azimuths) {
        a = kTwoPi * geom_rng.next_double();
    }
    std::vector<double> drifts(delays_s.size());
    for (std::size_t c = 0; c < delays_s.size(); ++c) {
        drifts[c] = config.speed_mps / kSpeedOfLight *
                    std::cos(mean_azimuths[c] - config.velocity_azimuth_rad);
    }

    // --- region partition -------------------------------------------------
    // Equal-length regions; the division remainder widens the last one.
    const int base_len = n / num_regions;
    std::vector<int> boundaries(static_cast<std::size_t>(num_regions) + 1, 0);
    for (int i = 0; i < num_regions; ++i) {
        boundaries[static_cast<std::size_t>(i) + 1] =
            (i == num_regions - 1) ? n : (i + 1) * base_len;
    }

    // --- per-region ray churn ---------------------------------------------
    std::vector<std::vector<RayState>> states(delays_s.size());
    std::vector<double> l_tot(delays_s.size());
    for (std::size_t c = 0; c < delays_s.size(); ++c) {
        l_tot[c] = delays_s[c] * config.bandwidth_hz;
    }

    realization.regions.reserve(static_cast<std::size_t>(num_regions));
    for (int i = 0; i < num_regions; ++i) {
        StationarityRegion region;
        region.index = i;
        region.sample_begin = boundaries[static_cast<std::size_t>(i)];
        region.sample_end = boundaries[static_cast<std::size_t>(i) + 1];

        for (std::size_t c = 0; c < delays_s.size(); ++c) {
            Pcg32 cluster_rng = make_cluster_stream(seed, i, static_cast<int>(c));
            if (i == 0) {
                // Fresh draw of the full ray set.
                const int count = ray_counts[c];
                states[c].reserve(static_cast<std::size_t>(count));
                for (int r = 0; r < count; ++r) {
                    states[c].push_back(fresh_ray(config, mean_azimuths[c],
                                                  config.cluster_sector_width_rad,
                                                  cluster_rng));
                }
            } else {
                // Birth–death: Bernoulli survival, Poisson births at the
                // complementary rate so the mean ray count is stationary.
                std::vector<RayState> next;
                next.reserve(states[c].size());
                for (const auto &s : states[c]) {
                    if (cluster_rng.next_double() < config.survival_prob) {
                        next.push_back(s);
                    }
                }
                int births = sample_poisson(
                    cluster_rng, (1.0 - config.survival_prob) * config.ray_rate);
                if (next.empty() && births == 0) {
                    births = 1; // never let a cluster go dark
                }
                for (int b = 0; b < births; ++b) {
                    next.push_back(fresh_ray(config, mean_azimuths[c],
                                             config.cluster_sector_width_rad,
                                             cluster_rng));
                }
                states[c] = std::move(next);
            }

            region.clusters.push_back(finalize_cluster(
                config, powers[c], delays_s[c], l_tot[c], drifts[c],
                mean_azimuths[c], config.cluster_sector_width_rad, states[c]));
        }

        // Drift the resolvable delays across this region's duration, clamped
        // to the representable grid.
        const int region_len = region.sample_end - region.sample_begin;
        for (std::size_t c = 0; c < delays_s.size(); ++c) {
            l_tot[c] += drifts[c] * static_cast<double>(region_len);
            l_tot[c] = std::clamp(l_tot[c], 0.0,
                                  std::nextafter(static_cast<double>(n), 0.0));
        }

        realization.regions.push_back(std::move(region));
    }
    return realization;
}

ChannelRealization generate_realization(const ChannelConfig &config) {
    Pcg32 rng(config.rng_seed, 0);
    return segment_regions(config, rng);
}

} // namespace waveformlab
