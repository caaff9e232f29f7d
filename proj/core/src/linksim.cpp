// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "waveformlab/linksim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "waveformlab/fft.hpp"
#include "waveformlab/operators.hpp"

namespace waveformlab {
namespace {

constexpr std::complex<double> kI{0.0, 1.0};

// Exact rational phase: e^{-i 2 pi num/den} with the fraction reduced in
// integer arithmetic first, so large indices do not lose precision.
std::complex<double> unit_phase(long long num, long long den) {
    long long r = num % den;
    if (r < 0) r += den;
    return std::exp(-kI * (2.0 * std::numbers::pi * static_cast<double>(r) /
                           static_cast<double>(den)));
}

int wrap_index(long long v, int n) {
    long long r = v % n;
    if (r < 0) r += n;
    return static_cast<int>(r);
}

long long nearest_ll(double x) {
    return static_cast<long long>(std::ceil(x - 0.5));
}

int bits_per_symbol(int modulation_order) {
    switch (modulation_order) {
    case 4:
        return 2;
    case 16:
        return 4;
    case 64:
        return 6;
    case 256:
        return 8;
    default:
        throw std::invalid_argument(
            "modulation_order must be one of 4, 16, 64, 256");
    }
}

// Per-axis PAM scale so the complex constellation has unit average energy.
double qam_scale(int levels) {
    return 1.0 / std::sqrt(2.0 * (static_cast<double>(levels) * levels - 1.0) /
                           3.0);
}

int gray_to_binary(int g) {
    int b = g;
    for (int shift = g >> 1; shift != 0; shift >>= 1) b ^= shift;
    return b;
}

// Nearest PAM level index for an amplitude already divided by the scale.
int nearest_level(double amp, int levels) {
    int idx = static_cast<int>(std::lround((amp + (levels - 1)) / 2.0));
    return std::clamp(idx, 0, levels - 1);
}

double pam_amplitude(int level_index, int levels) {
    return static_cast<double>(2 * level_index - (levels - 1));
}

// Runs fn(begin, end) over [0, count) split across `threads` workers and
// rethrows the first failure.
template <typename Fn>
void parallel_for(int count, int threads, Fn &&fn) {
    threads = std::max(1, threads);
    if (threads == 1 || count <= 1) {
        fn(0, count);
        return;
    }
    threads = std::min(threads, count);
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const int chunk = (count + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        const int begin = w * chunk;
        const int end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, &failure, &failure_mutex, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto &t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace

// =========================================================================
// Modulation
// =========================================================================

CVec modulate(const std::vector<int> &bits, int modulation_order) {
    const int bps = bits_per_symbol(modulation_order);
    if (bits.size() % static_cast<std::size_t>(bps) != 0) {
        throw std::invalid_argument(
            "bit count must be a multiple of log2(modulation_order)");
    }
    const int levels = static_cast<int>(std::lround(
        std::sqrt(static_cast<double>(modulation_order))));
    const int axis_bits = bps / 2;
    const double scale = qam_scale(levels);
    const int count = static_cast<int>(bits.size()) / bps;
    CVec symbols(count);
    for (int s = 0; s < count; ++s) {
        int gi = 0;
        int gq = 0;
        for (int b = 0; b < axis_bits; ++b) {
            const int bi = bits[static_cast<std::size_t>(s) * bps + b];
            const int bq =
                bits[static_cast<std::size_t>(s) * bps + axis_bits + b];
            if ((bi != 0 && bi != 1) || (bq != 0 && bq != 1)) {
                throw std::invalid_argument("bits must be 0 or 1");
            }
            gi = (gi << 1) | bi;
            gq = (gq << 1) | bq;
        }
        const double re = pam_amplitude(gray_to_binary(gi), levels) * scale;
        const double im = pam_amplitude(gray_to_binary(gq), levels) * scale;
        symbols(s) = {re, im};
    }
    return symbols;
}

std::vector<int> demodulate(const CVec &symbols, int modulation_order) {
    const int bps = bits_per_symbol(modulation_order);
    const int levels = static_cast<int>(std::lround(
        std::sqrt(static_cast<double>(modulation_order))));
    const int axis_bits = bps / 2;
    const double scale = qam_scale(levels);
    std::vector<int> bits(static_cast<std::size_t>(symbols.size()) * bps);
    for (int s = 0; s < symbols.size(); ++s) {
        const int li = nearest_level(symbols(s).real() / scale, levels);
        const int lq = nearest_level(symbols(s).imag() / scale, levels);
        const int gi = li ^ (li >> 1);
        const int gq = lq ^ (lq >> 1);
        for (int b = 0; b < axis_bits; ++b) {
            bits[static_cast<std::size_t>(s) * bps + b] =
                (gi >> (axis_bits - 1 - b)) & 1;
            bits[static_cast<std::size_t>(s) * bps + axis_bits + b] =
                (gq >> (axis_bits - 1 - b)) & 1;
        }
    }
    return bits;
}

CVec slice_symbols(const CVec &estimates, int modulation_order) {
    const int levels = static_cast<int>(std::lround(
        std::sqrt(static_cast<double>(modulation_order))));
    bits_per_symbol(modulation_order); // validates the order
    const double scale = qam_scale(levels);
    CVec sliced(estimates.size());
    for (int s = 0; s < estimates.size(); ++s) {
        const int li = nearest_level(estimates(s).real() / scale, levels);
        const int lq = nearest_level(estimates(s).imag() / scale, levels);
        sliced(s) = {pam_amplitude(li, levels) * scale,
                     pam_amplitude(lq, levels) * scale};
    }
    return sliced;
}

std::vector<int> random_bits(Pcg32 &rng, int count) {
    if (count < 0) throw std::invalid_argument("bit count must be >= 0");
    std::vector<int> bits(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        bits[static_cast<std::size_t>(i)] =
            static_cast<int>(rng.next_u32() >> 31);
    }
    return bits;
}

// =========================================================================
// Equalizers
// =========================================================================

CVec equalize_mmse(const CMat &h_eff, const CVec &y, double noise_var) {
    if (h_eff.rows() != y.size()) {
        throw std::invalid_argument("observation length must match H rows");
    }
    if (noise_var < 0.0 || !std::isfinite(noise_var)) {
        throw std::invalid_argument("noise variance must be finite and >= 0");
    }
    if (noise_var == 0.0) {
        // Zero-noise MMSE degenerates to the pseudo-inverse solve.
        return h_eff.completeOrthogonalDecomposition().solve(y);
    }
    CMat gram = h_eff.adjoint() * h_eff;
    gram.diagonal().array() += noise_var;
    return gram.ldlt().solve(h_eff.adjoint() * y);
}

CVec equalize_mrc(const CMat &h_eff, const CVec &y,
                  std::vector<int> *unrecoverable) {
    if (h_eff.rows() != y.size()) {
        throw std::invalid_argument("observation length must match H rows");
    }
    if (unrecoverable != nullptr) unrecoverable->clear();
    CVec matched = h_eff.adjoint() * y;
    CVec out(h_eff.cols());
    for (int n = 0; n < h_eff.cols(); ++n) {
        const double g = h_eff.col(n).squaredNorm();
        if (g > 0.0) {
            out(n) = matched(n) / g;
        } else {
            out(n) = 0.0;
            if (unrecoverable != nullptr) unrecoverable->push_back(n);
        }
    }
    return out;
}

CVec equalize_mrc_sic(const CMat &h_eff, const CVec &y, double noise_var,
                      int modulation_order, int sic_rounds) {
    if (h_eff.rows() != y.size()) {
        throw std::invalid_argument("observation length must match H rows");
    }
    if (noise_var < 0.0 || !std::isfinite(noise_var)) {
        throw std::invalid_argument("noise variance must be finite and >= 0");
    }
    if (sic_rounds < 0) throw std::invalid_argument("sic_rounds must be >= 0");
    bits_per_symbol(modulation_order); // validates the order
    const int n = static_cast<int>(h_eff.cols());
    CMat gram = h_eff.adjoint() * h_eff;
    gram.diagonal().array() += noise_var;
    const CVec z = h_eff.adjoint() * y;

    // Conjugate gradient from x = 0: the first direction is the matched
    // filter, later iterations sharpen it toward the regularized LS point.
    CVec x = CVec::Zero(n);
    CVec r = z;
    CVec p = z;
    double rs = r.squaredNorm();
    const double tol = 1e-8 * std::sqrt(z.squaredNorm());
    for (int it = 0; it < 2 * n && std::sqrt(rs) > tol; ++it) {
        const CVec gp = gram * p;
        const double curvature = p.dot(gp).real();
        if (curvature <= 0.0) break;
        const double alpha = rs / curvature;
        x += alpha * p;
        r -= alpha * gp;
        const double rs_next = r.squaredNorm();
        p = r + (rs_next / rs) * p;
        rs = rs_next;
    }

    // Hard-decision interference cancellation sweeps.
    const CVec diag = gram.diagonal();
    for (int round = 0; round < sic_rounds; ++round) {
        const CVec decided = slice_symbols(x, modulation_order);
        const CVec cross = gram * decided - diag.cwiseProduct(decided);
        for (int i = 0; i < n; ++i) {
            const double d = diag(i).real();
            x(i) = d > 0.0 ? (z(i) - cross(i)) / d : 0.0;
        }
    }
    return x;
}

// =========================================================================
// Channel estimation
// =========================================================================

namespace {

void add_awgn(CVec &v, double noise_var, Pcg32 &rng) {
    if (noise_var <= 0.0) return;
    const double s = std::sqrt(noise_var / 2.0);
    for (int i = 0; i < v.size(); ++i) {
        v(i) += std::complex<double>(s * sample_normal(rng),
                                     s * sample_normal(rng));
    }
}

double estimate_nmse(const CMat &h_true, const CMat &h_hat) {
    const double denom = h_true.squaredNorm();
    const double num = (h_true - h_hat).squaredNorm();
    if (denom > 0.0) return num / denom;
    return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

// Impulse-pilot estimation for the delay-Doppler style waveforms: read taps
// off the pilot response where it clears the detection threshold, then
// rebuild the effective channel through the sparse closed form.
ChannelEstimate estimate_impulse(const CMat &h_true, const WaveformSpec &spec,
                                 double noise_var, Pcg32 &rng) {
    const int n = spec.frame_len;
    CVec y = h_true.col(0);
    add_awgn(y, noise_var, rng);

    struct Hypothesis {
        int delay = 0;
        int doppler = 0;
        std::complex<double> pilot_phase{1.0, 0.0};
    };
    std::vector<std::optional<Hypothesis>> table(
        static_cast<std::size_t>(n));

    if (spec.kind == WaveformKind::AFDM) {
        const int c = 2 * spec.afdm_kmax + 1;
        const int l_limit = std::max(0, n / c - 1);
        for (int l = 0; l <= l_limit; ++l) {
            for (int k = -spec.afdm_kmax; k <= spec.afdm_kmax; ++k) {
                const int bin = wrap_index(static_cast<long long>(k) -
                                               static_cast<long long>(c) * l,
                                           n);
                Hypothesis h;
                h.delay = l;
                h.doppler = k;
                // Pilot column phase: -c2 m^2 + c1 l^2 in turns.
                h.pilot_phase =
                    unit_phase(static_cast<long long>(bin) * bin -
                                   static_cast<long long>(c) * l * l,
                               2LL * n);
                table[static_cast<std::size_t>(bin)] = h;
            }
        }
    } else { // OTFS
        const int mm = spec.otfs_delay_bins;
        const int nn = spec.otfs_doppler_bins;
        for (int l = 0; l < mm; ++l) {
            for (int mu = 0; mu < nn; ++mu) {
                const int k = mu <= (nn - 1) / 2 ? mu : mu - nn;
                const int bin = mu * mm + l;
                Hypothesis h;
                h.delay = l;
                h.doppler = k;
                h.pilot_phase = unit_phase(-static_cast<long long>(k) * l, n);
                table[static_cast<std::size_t>(bin)] = h;
            }
        }
    }

    const double numeric_floor = 1e-9 * y.cwiseAbs().maxCoeff();
    const double threshold =
        std::max(3.0 * std::sqrt(std::max(noise_var, 0.0)), numeric_floor);

    SparseChannelSpec detected;
    detected.waveform = spec;
    for (int bin = 0; bin < n; ++bin) {
        if (!table[static_cast<std::size_t>(bin)].has_value()) continue;
        if (std::abs(y(bin)) <= threshold) continue;
        const Hypothesis &h = *table[static_cast<std::size_t>(bin)];
        SparseTap tap;
        tap.delay_int = h.delay;
        tap.doppler_int = h.doppler;
        tap.gain = y(bin) / h.pilot_phase;
        detected.taps.push_back(tap);
    }

    ChannelEstimate out;
    out.taps_detected = static_cast<int>(detected.taps.size());
    if (detected.taps.empty()) {
        out.empty = true;
        out.h_eff_hat = CMat::Zero(n, n);
    } else {
        out.h_eff_hat = sparse_oracle_matrix(detected);
    }
    out.nmse = estimate_nmse(h_true, out.h_eff_hat);
    return out;
}

// Comb-pilot estimation for the frequency-domain waveforms: per-tone least
// squares on the diagonal at the pilot tones, circular linear interpolation
// in between. DFT-s-OFDM is estimated in its tone domain and despread back.
ChannelEstimate estimate_comb(const CMat &h_true, const WaveformSpec &spec,
                              double noise_var, Pcg32 &rng,
                              int pilot_spacing) {
    const bool despread = spec.kind == WaveformKind::DFT_S_OFDM;
    const int nt = despread ? spec.dfts_num_tones : spec.frame_len;

    CMat tone_true;
    CMat despread_mat;
    if (despread) {
        despread_mat = dft_matrix(nt);
        tone_true = despread_mat.adjoint() * h_true * despread_mat;
    } else {
        tone_true = h_true;
    }

    std::vector<int> pilots;
    for (int p = 0; p < nt; p += pilot_spacing) pilots.push_back(p);

    CVec x_pilot = CVec::Zero(nt);
    for (int p : pilots) x_pilot(p) = 1.0;
    CVec y = tone_true * x_pilot;
    add_awgn(y, noise_var, rng);

    CVec diag_hat(nt);
    const int np = static_cast<int>(pilots.size());
    if (np == 1) {
        diag_hat.setConstant(y(pilots[0]));
    } else {
        for (int i = 0; i < np; ++i) {
            const int p0 = pilots[static_cast<std::size_t>(i)];
            const int p1 = pilots[static_cast<std::size_t>((i + 1) % np)];
            const int span = (p1 - p0 + nt - 1) % nt + 1;
            const std::complex<double> v0 = y(p0);
            const std::complex<double> v1 = y(p1);
            for (int t = 0; t < span; ++t) {
                diag_hat((p0 + t) % nt) =
                    v0 + (v1 - v0) * (static_cast<double>(t) / span);
            }
        }
    }

    ChannelEstimate out;
    CMat tone_hat = CMat::Zero(nt, nt);
    tone_hat.diagonal() = diag_hat;
    out.h_eff_hat =
        despread ? CMat(despread_mat * tone_hat * despread_mat.adjoint())
                 : tone_hat;
    out.nmse = estimate_nmse(h_true, out.h_eff_hat);
    return out;
}

} // namespace

ChannelEstimate estimate_channel_simple(const CMat &h_eff_true,
                                        const WaveformSpec &spec,
                                        double noise_var, Pcg32 &rng,
                                        int pilot_spacing) {
    spec.validate();
    const int dim = spec.output_dim();
    if (h_eff_true.rows() != dim || h_eff_true.cols() != dim) {
        throw std::invalid_argument(
            "effective channel dimensions must match the waveform");
    }
    if (noise_var < 0.0 || !std::isfinite(noise_var)) {
        throw std::invalid_argument("noise variance must be finite and >= 0");
    }
    if (pilot_spacing < 1) {
        throw std::invalid_argument("pilot_spacing must be >= 1");
    }
    switch (spec.kind) {
    case WaveformKind::AFDM:
    case WaveformKind::OTFS:
        return estimate_impulse(h_eff_true, spec, noise_var, rng);
    case WaveformKind::OFDM:
    case WaveformKind::DFT_S_OFDM:
        return estimate_comb(h_eff_true, spec, noise_var, rng, pilot_spacing);
    }
    throw std::invalid_argument("unknown waveform kind");
}

// =========================================================================
// Monte Carlo link simulation
// =========================================================================

namespace {

constexpr std::uint64_t kTagTrialData = 0x6c6b2d64617461ULL; // "lk-data"
constexpr std::uint64_t kTagChannel = 0x6c6b2d6368616eULL;   // "lk-chan"

} // namespace

ChannelRealization draw_channel(const ChannelSource &source,
                                std::uint64_t substream) {
    ChannelConfig cfg = source.config;
    cfg.rng_seed = mix_key(mix_key(source.seed, kTagChannel), substream);
    if (source.regime == Regime::sparse) cfg.num_regions = 1;
    ChannelRealization real = generate_realization(cfg);
    if (source.regime != Regime::sparse) return real;

    // Downscale premise: single region, one ray per cluster, delays and
    // Dopplers snapped to the grid.
    const int n = cfg.frame_len;
    const double frame_s = frame_duration_s(cfg);
    for (auto &region : real.regions) {
        for (auto &cluster : region.clusters) {
            cluster.rays.resize(1);
            Ray &ray = cluster.rays.front();
            ray.power_fraction = 1.0;
            ray.gain = std::polar(std::sqrt(cluster.power), ray.phase_rad);
            const long long l_int =
                nearest_ll(cluster.delay_norm_total +
                           ray.delay_offset_norm);
            const int l = wrap_index(l_int, n);
            cluster.delay_norm_total = static_cast<double>(l);
            cluster.delay_s = static_cast<double>(l) / cfg.bandwidth_hz;
            ray.delay_offset_norm = 0.0;
            const long long k_int = nearest_ll(ray.doppler_norm_total);
            ray.doppler_norm_total = static_cast<double>(k_int);
            ray.doppler_hz = static_cast<double>(k_int) / frame_s;
        }
    }
    return real;
}

namespace {

struct EnsembleStats {
    double rho = 0.0;
    double gain_sig = 0.0; // mean ||H_id||_F^2 / dim
};

EnsembleStats ensemble_stats(const ChannelSource &source,
                             const WaveformSpec &spec, CsiMode csi,
                             int ensemble_size, int pilot_spacing,
                             IdealRef ideal) {
    if (ensemble_size < 1) {
        throw std::invalid_argument("ensemble size must be >= 1");
    }
    const int dim = spec.output_dim();
    double rho_sum = 0.0;
    double gain_sum = 0.0;
    for (int e = 0; e < ensemble_size; ++e) {
        const ChannelRealization real =
            draw_channel(source, 0x656e73ULL + static_cast<std::uint64_t>(e));
        const ChannelMatrix h = assemble_global(real);
        const CMat h_eff = effective_channel(h, spec).matrix;
        if (csi == CsiMode::estimated) {
            // Receiver-centric split: the equalizer trusts the noiseless
            // pilot estimate, so the floor is set by what it misses.
            Pcg32 rng(mix_key(source.seed, 0x6365ULL),
                      static_cast<std::uint64_t>(e));
            const ChannelEstimate est = estimate_channel_simple(
                h_eff, spec, 0.0, rng, pilot_spacing);
            const double sig = est.h_eff_hat.squaredNorm() / dim;
            const double miss = mismatch_energy(h_eff, est.h_eff_hat) / dim;
            rho_sum += sig > 0.0 ? miss / sig : 1e12;
            gain_sum += sig;
        } else {
            const CMat h_id = ideal_reference(real, spec, ideal);
            const LeakageReport rep = leakage_split(h_eff, h_id, 1.0);
            if (rep.gamma_sig > 0.0) {
                rho_sum += rep.gamma_leak / rep.gamma_sig;
            }
            gain_sum += rep.gamma_sig;
        }
    }
    EnsembleStats out;
    out.rho = rho_sum / ensemble_size;
    out.gain_sig = gain_sum / ensemble_size;
    return out;
}

struct TrialOutcome {
    long long errors = 0;
    long long bits = 0;
    double nmse = 0.0;
};

TrialOutcome run_trial(const LinkConfig &link, const ChannelSource &source,
                       int snr_index, int trial_index, double noise_var) {
    const std::uint64_t substream =
        (static_cast<std::uint64_t>(snr_index) << 40) +
        static_cast<std::uint64_t>(trial_index);
    const ChannelRealization real = draw_channel(source, substream);
    const ChannelMatrix h = assemble_global(real);
    const CMat h_eff = effective_channel(h, link.waveform).matrix;

    Pcg32 rng(mix_key(mix_key(source.seed, kTagTrialData), substream), 5);
    const int dim = link.waveform.output_dim();
    const int bps = bits_per_symbol(link.modulation_order);
    const std::vector<int> tx_bits = random_bits(rng, dim * bps);
    const CVec x = modulate(tx_bits, link.modulation_order);

    CVec y = h_eff * x;
    add_awgn(y, noise_var, rng);

    TrialOutcome out;
    const CMat *h_rx = &h_eff;
    CMat h_est;
    if (link.csi == CsiMode::estimated) {
        ChannelEstimate est = estimate_channel_simple(
            h_eff, link.waveform, noise_var, rng, link.pilot_spacing);
        out.nmse = est.nmse;
        h_est = std::move(est.h_eff_hat);
        h_rx = &h_est;
    }

    CVec x_hat;
    switch (link.equalizer) {
    case Equalizer::MMSE:
        x_hat = equalize_mmse(*h_rx, y, noise_var);
        break;
    case Equalizer::MRC:
        x_hat = equalize_mrc(*h_rx, y);
        break;
    case Equalizer::MRC_SIC:
        x_hat = equalize_mrc_sic(*h_rx, y, noise_var, link.modulation_order);
        break;
    }

    const std::vector<int> rx_bits =
        demodulate(x_hat, link.modulation_order);
    for (std::size_t i = 0; i < tx_bits.size(); ++i) {
        if (tx_bits[i] != rx_bits[i]) ++out.errors;
    }
    out.bits = static_cast<long long>(tx_bits.size());
    return out;
}

} // namespace

double mean_rho(const ChannelSource &source, const WaveformSpec &waveform,
                CsiMode csi, int ensemble_size, int pilot_spacing,
                IdealRef ideal) {
    return ensemble_stats(source, waveform, csi, ensemble_size, pilot_spacing,
                          ideal)
        .rho;
}

LinkReport run_ber(const LinkConfig &link, const ChannelSource &source) {
    link.waveform.validate();
    bits_per_symbol(link.modulation_order);
    if (link.snr_grid_db.empty()) {
        throw std::invalid_argument("snr_grid_db must not be empty");
    }
    if (link.num_trials < 1) {
        throw std::invalid_argument("num_trials must be >= 1");
    }
    if (link.min_errors < 1) {
        throw std::invalid_argument("min_errors must be >= 1");
    }

    // Ensemble statistics drive the analytic reference curve.
    const EnsembleStats stats =
        ensemble_stats(source, link.waveform, link.csi,
                       std::min(32, std::max(8, link.num_trials / 8)),
                       link.pilot_spacing, IdealRef::region0);

    LinkReport report;
    report.rho_mean = stats.rho;
    constexpr int kBatch = 64;

    for (std::size_t si = 0; si < link.snr_grid_db.size(); ++si) {
        const double snr_db = link.snr_grid_db[si];
        const double snr = std::pow(10.0, snr_db / 10.0);
        const double noise_var = 1.0 / snr;

        std::vector<TrialOutcome> outcomes(
            static_cast<std::size_t>(link.num_trials));
        long long errors = 0;
        long long bits = 0;
        double nmse_sum = 0.0;
        int done = 0;
        while (done < link.num_trials && errors < link.min_errors) {
            const int count = std::min(kBatch, link.num_trials - done);
            parallel_for(count, link.num_threads, [&](int begin, int end) {
                for (int t = begin; t < end; ++t) {
                    outcomes[static_cast<std::size_t>(done + t)] =
                        run_trial(link, source, static_cast<int>(si),
                                  done + t, noise_var);
                }
            });
            // Reduce in index order so results do not depend on threads.
            for (int t = 0; t < count; ++t) {
                const TrialOutcome &o =
                    outcomes[static_cast<std::size_t>(done + t)];
                errors += o.errors;
                bits += o.bits;
                nmse_sum += o.nmse;
            }
            done += count;
        }

        SnrPointReport row;
        row.snr_db = snr_db;
        row.bit_errors = errors;
        row.bits = bits;
        row.trials = done;
        row.ber_mc = bits > 0 ? static_cast<double>(errors) / bits : 0.0;
        const double half_width =
            bits > 0 ? 1.96 * std::sqrt(row.ber_mc * (1.0 - row.ber_mc) /
                                        static_cast<double>(bits))
                     : 0.0;
        row.ber_ci_low = std::max(0.0, row.ber_mc - half_width);
        row.ber_ci_high = std::min(1.0, row.ber_mc + half_width);
        const double gamma_id = stats.gain_sig * snr;
        row.ber_analytic = analytic_ber(effective_sinr(gamma_id, stats.rho),
                                        link.modulation_order);
        row.nmse_ce = (link.csi == CsiMode::estimated && done > 0)
                          ? nmse_sum / done
                          : 0.0;
        report.rows.push_back(row);
    }
    return report;
}

// =========================================================================
// PAPR and spectral efficiency
// =========================================================================

CVec apply_kernel_adjoint(const WaveformSpec &spec, const CVec &symbols) {
    spec.validate();
    if (symbols.size() != spec.output_dim()) {
        throw std::invalid_argument(
            "symbol vector length must match the waveform input size");
    }
    const int n = spec.frame_len;
    switch (spec.kind) {
    case WaveformKind::OFDM: {
        CVec s = symbols;
        fft::inverse(s.data(), n);
        return s * std::sqrt(static_cast<double>(n));
    }
    case WaveformKind::AFDM: {
        CVec s(n);
        // A^H = Theta1^H F^H Theta2^H with Theta_i = diag(e^{-i2pi c_i q^2}).
        for (int q = 0; q < n; ++q) {
            s(q) = symbols(q) /
                   unit_phase(static_cast<long long>(q) * q, 2LL * n);
        }
        fft::inverse(s.data(), n);
        s *= std::sqrt(static_cast<double>(n));
        const long long c1_num = 2LL * spec.afdm_kmax + 1;
        for (int q = 0; q < n; ++q) {
            s(q) /= unit_phase(c1_num * q * q, 2LL * n);
        }
        return s;
    }
    case WaveformKind::OTFS: {
        const int mm = spec.otfs_delay_bins;
        const int nn = spec.otfs_doppler_bins;
        CVec s(n);
        CVec slice(nn);
        for (int b = 0; b < mm; ++b) {
            for (int mu = 0; mu < nn; ++mu) slice(mu) = symbols(mu * mm + b);
            fft::inverse(slice.data(), nn);
            slice *= std::sqrt(static_cast<double>(nn));
            for (int lam = 0; lam < nn; ++lam) s(lam * mm + b) = slice(lam);
        }
        return s;
    }
    case WaveformKind::DFT_S_OFDM: {
        // A = F_{nd} S F_n, so A^H x = F_n^H S^T (F_{nd}^H x).
        const int nd = spec.dfts_num_tones;
        CVec tones = symbols;
        fft::inverse(tones.data(), nd);
        tones *= std::sqrt(static_cast<double>(nd));
        CVec grid = CVec::Zero(n);
        for (int t = 0; t < nd; ++t) grid(spec.dfts_first_tone + t) = tones(t);
        fft::inverse(grid.data(), n);
        return grid * std::sqrt(static_cast<double>(n));
    }
    }
    throw std::invalid_argument("unknown waveform kind");
}

double papr_db(const WaveformSpec &spec, const CVec &symbols, int oversample) {
    if (oversample < 1) throw std::invalid_argument("oversample must be >= 1");
    CVec s = apply_kernel_adjoint(spec, symbols);
    const int n = static_cast<int>(s.size());
    if (oversample > 1) {
        // Zero-padded spectral interpolation.
        fft::forward(s.data(), n);
        const int big = oversample * n;
        const int head = n - n / 2;
        CVec padded = CVec::Zero(big);
        padded.head(head) = s.head(head);
        padded.tail(n / 2) = s.tail(n / 2);
        fft::inverse(padded.data(), big);
        s = std::move(padded);
    }
    const double mean_power = s.squaredNorm() / static_cast<double>(s.size());
    if (mean_power <= 0.0) {
        throw std::invalid_argument("frame has zero power");
    }
    double peak = 0.0;
    for (int i = 0; i < s.size(); ++i) {
        peak = std::max(peak, std::norm(s(i)));
    }
    return 10.0 * std::log10(peak / mean_power);
}

std::vector<PaprCcdfPoint> measure_papr(const WaveformSpec &spec,
                                        int modulation_order, int num_frames,
                                        int oversample, std::uint64_t seed,
                                        const std::vector<double> &thresholds_db,
                                        int num_threads) {
    spec.validate();
    const int bps = bits_per_symbol(modulation_order);
    if (num_frames < 1) throw std::invalid_argument("num_frames must be >= 1");
    const int dim = spec.output_dim();

    std::vector<double> paprs(static_cast<std::size_t>(num_frames));
    parallel_for(num_frames, num_threads, [&](int begin, int end) {
        for (int f = begin; f < end; ++f) {
            Pcg32 rng(mix_key(seed, 0x70617072ULL),
                      static_cast<std::uint64_t>(f));
            const std::vector<int> bits = random_bits(rng, dim * bps);
            const CVec x = modulate(bits, modulation_order);
            paprs[static_cast<std::size_t>(f)] = papr_db(spec, x, oversample);
        }
    });

    std::vector<PaprCcdfPoint> ccdf;
    ccdf.reserve(thresholds_db.size());
    for (double thr : thresholds_db) {
        int above = 0;
        for (double p : paprs) {
            if (p > thr) ++above;
        }
        ccdf.push_back({thr, static_cast<double>(above) / num_frames});
    }
    return ccdf;
}

double overhead_eta(const WaveformSpec &spec, double l_max, double k_max,
                    int pilot_spacing) {
    spec.validate();
    if (l_max < 0.0 || k_max < 0.0) {
        throw std::invalid_argument("l_max and k_max must be >= 0");
    }
    if (pilot_spacing < 1) {
        throw std::invalid_argument("pilot_spacing must be >= 1");
    }
    const double n = static_cast<double>(spec.frame_len);
    const double n_cp = std::ceil(1.2 * l_max);
    switch (spec.kind) {
    case WaveformKind::OFDM:
    case WaveformKind::DFT_S_OFDM:
        // Cyclic prefix per symbol plus one comb pilot tone in
        // `pilot_spacing`.
        return (n / (n + n_cp)) * (1.0 - 1.0 / pilot_spacing);
    case WaveformKind::AFDM:
    case WaveformKind::OTFS: {
        // Prefix plus an embedded impulse pilot with its guard region.
        const double guard =
            std::ceil(l_max) * (2.0 * std::ceil(k_max) + 1.0);
        const double data = n - 1.0 - guard;
        return data > 0.0 ? data / (n + n_cp) : 0.0;
    }
    }
    throw std::invalid_argument("unknown waveform kind");
}

double spectral_efficiency(double gamma_eff, double target_ber,
                           double overhead_eta) {
    if (!(target_ber > 0.0 && target_ber < 1.0)) {
        throw std::invalid_argument("target_ber must lie in (0, 1)");
    }
    if (overhead_eta < 0.0 || overhead_eta > 1.0) {
        throw std::invalid_argument("overhead_eta must lie in [0, 1]");
    }
    if (gamma_eff < 0.0) {
        throw std::invalid_argument("gamma_eff must be >= 0");
    }
    for (int order : {256, 64, 16, 4}) {
        if (analytic_ber(gamma_eff, order) <= target_ber) {
            return overhead_eta * std::log2(static_cast<double>(order));
        }
    }
    return 0.0;
}

} // namespace waveformlab
