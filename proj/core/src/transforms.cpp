// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "waveformlab/transforms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace waveformlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using Cplx = std::complex<double>;

Cplx phasor(double turns) {
    // e^{j 2 pi turns}
    return std::polar(1.0, kTwoPi * turns);
}

// Exact fractional turns for rational phases: (num / den) mod 1, reduced in
// integer arithmetic so large quadratic chirp indices keep full precision.
double frac_turns(long long num, long long den) {
    return static_cast<double>(((num % den) + den) % den) /
           static_cast<double>(den);
}

// =========================================================================
// Entrywise evaluation, OFDM / AFDM
// =========================================================================
// Both kernels have the form Theta2 * F * Theta1 (OFDM: c1 = c2 = 0). With
// the delay operator expanded through its DFT-domain index u, the effective
// channel is, per (region i, ray):
//
//   H_eff[m, n] += (h / N^2) * e^{-j2pi c2 m^2} e^{+j2pi c2 n^2}
//                  * sum_u e^{-j2pi u l / N} * Sp[(u - m) mod N]
//                                            * Sq[(n - u) mod N]
// with the receive-side sum restricted to the region,
//   Sp[t] = sum_{p in region} e^{-j2pi c1 p^2} e^{j2pi k p / N} e^{j2pi t p / N},
// and the transmit-side sum over the full frame,
//   Sq[t] = sum_q e^{j2pi c1 q^2} e^{j2pi t q / N}.
//
// The p- and q-sums are tabulated over t (both are N-periodic in t), making
// one ray cost one N x N x N matrix product. Chirp rates are passed as
// rational numerators over 2N (OFDM: 0, AFDM: 2*kmax+1 and 1) so the
// quadratic phases reduce exactly.
CMat entrywise_chirped(const ChannelRealization &realization, long long c1_num,
                       long long c2_num) {
    const int n = realization.config.frame_len;
    const double nd = static_cast<double>(n);
    const long long two_n = 2LL * n;

    // Global transmit-side table Sq and its circulant arrangement
    // SqM[u, col] = Sq[(col - u) mod N].
    CVec sq = CVec::Zero(n);
    for (int t = 0; t < n; ++t) {
        for (int q = 0; q < n; ++q) {
            sq(t) += phasor(frac_turns(c1_num * q * q, two_n) +
                            frac_turns(static_cast<long long>(t) * q, n));
        }
    }
    CMat sq_mat(n, n);
    for (int u = 0; u < n; ++u) {
        for (int col = 0; col < n; ++col) {
            sq_mat(u, col) = sq(((col - u) % n + n) % n);
        }
    }

    CMat h_eff = CMat::Zero(n, n);
    CVec au(n);
    CVec sp(n);
    CMat sp_mat(n, n);
    for (const auto &region : realization.regions) {
        for (const auto &cluster : region.clusters) {
            const double l_tot = cluster.delay_norm_total;
            for (int u = 0; u < n; ++u) {
                au(u) = phasor(-static_cast<double>(u) * l_tot / nd);
            }
            for (const auto &ray : cluster.rays) {
                const double k_tot = ray.doppler_norm_total;
                sp.setZero();
                for (int t = 0; t < n; ++t) {
                    for (int p = region.sample_begin; p < region.sample_end; ++p) {
                        sp(t) += phasor(-frac_turns(c1_num * p * p, two_n) +
                                        k_tot * p / nd +
                                        frac_turns(static_cast<long long>(t) * p, n));
                    }
                }
                // SpM[row, u] = Sp[(u - row) mod N]
                for (int row = 0; row < n; ++row) {
                    for (int u = 0; u < n; ++u) {
                        sp_mat(row, u) = sp(((u - row) % n + n) % n);
                    }
                }
                const Cplx pref = ray.gain / (nd * nd);
                h_eff.noalias() += pref * (sp_mat * au.asDiagonal() * sq_mat);
            }
        }
    }

    // Outer chirps commute out of all the sums.
    for (int m = 0; m < n; ++m) {
        for (int col = 0; col < n; ++col) {
            h_eff(m, col) *=
                phasor(-frac_turns(c2_num * m * m, two_n) +
                       frac_turns(c2_num * col * col, two_n));
        }
    }
    return h_eff;
}

// =========================================================================
// Entrywise evaluation, OTFS
// =========================================================================
// Kernel F_{N'} (x) I_{M'}: row (mu, a) = mu*M' + a, column (lam, b) =
// lam*M' + b. With the delay operator's DFT-index sum tabulated as
// G[t] = sum_u e^{j2pi u (t - l) / N}, each ray contributes
//
//   H_eff[(mu,a),(nu,b)] += h/(N' N) * sum_{lam, lam'}
//       e^{-j2pi mu lam / N'} e^{+j2pi nu lam' / N'}
//       * 1[a + lam*M' in region] * e^{j2pi k (a + lam*M') / N}
//       * G[(a - b + (lam - lam')*M') mod N]
CMat entrywise_otfs(const ChannelRealization &realization,
                    const WaveformSpec &spec) {
    const int n = spec.frame_len;
    const int mm = spec.otfs_delay_bins;   // M'
    const int nn = spec.otfs_doppler_bins; // N'
    const double nd = static_cast<double>(n);

    // Doppler-axis twiddles W[mu, lam] = e^{-j2pi mu lam / N'}.
    CMat w(nn, nn);
    for (int mu = 0; mu < nn; ++mu) {
        for (int lam = 0; lam < nn; ++lam) {
            w(mu, lam) = phasor(-static_cast<double>(mu) * lam /
                                static_cast<double>(nn));
        }
    }

    CMat h_eff = CMat::Zero(n, n);
    CVec g(n);
    CVec dop(n);
    for (const auto &region : realization.regions) {
        for (const auto &cluster : region.clusters) {
            // G = N * (first-column pattern of P(l)).
            g = nd * frac_delay_kernel(cluster.delay_norm_total, n);
            for (const auto &ray : cluster.rays) {
                for (int p = 0; p < n; ++p) {
                    const bool in_region =
                        p >= region.sample_begin && p < region.sample_end;
                    dop(p) = in_region
                                 ? phasor(ray.doppler_norm_total * p / nd)
                                 : Cplx(0.0, 0.0);
                }
                const Cplx pref =
                    ray.gain / (static_cast<double>(nn) * nd);
                for (int mu = 0; mu < nn; ++mu) {
                    for (int a = 0; a < mm; ++a) {
                        const int row = mu * mm + a;
                        for (int nu = 0; nu < nn; ++nu) {
                            for (int b = 0; b < mm; ++b) {
                                Cplx acc(0.0, 0.0);
                                for (int lam = 0; lam < nn; ++lam) {
                                    const Cplx left = dop(a + lam * mm) * w(mu, lam);
                                    if (left == Cplx(0.0, 0.0)) {
                                        continue;
                                    }
                                    Cplx inner(0.0, 0.0);
                                    for (int lam2 = 0; lam2 < nn; ++lam2) {
                                        const int t =
                                            ((a - b + (lam - lam2) * mm) % n + n) % n;
                                        inner += std::conj(w(nu, lam2)) * g(t);
                                    }
                                    acc += left * inner;
                                }
                                h_eff(row, nu * mm + b) += pref * acc;
                            }
                        }
                    }
                }
            }
        }
    }
    return h_eff;
}

// =========================================================================
// Entrywise evaluation, DFT-s-OFDM
// =========================================================================
// The composite kernel row m is A[m, p] = g(m, p) / sqrt(N_d N) with
//   g(m, p) = e^{-j2pi k0 p / N} * sum_{mu=0}^{N_d-1} e^{-j2pi mu (m/N_d + p/N)},
// the inner sum in closed geometric form. Expanding the delay operator
// through its DFT index u gives, per (region, ray):
//
//   H_eff[m, n] += h/(N^2 N_d) * sum_u e^{-j2pi u l / N} L[m, u] R[n, u]
//   L[m, u] = sum_{p in region} g(m, p) e^{j2pi (k + u) p / N}
//   R[n, u] = sum_q conj(g(n, q)) e^{-j2pi u q / N}
//
// R is channel-independent; L costs one (N_d x N) x (N x N) product per ray.
CMat entrywise_dfts(const ChannelRealization &realization,
                    const WaveformSpec &spec) {
    const int n = spec.frame_len;
    const int ndim = spec.dfts_num_tones; // N_d
    const int k0 = spec.dfts_first_tone;
    const double nd = static_cast<double>(n);
    const double dd = static_cast<double>(ndim);

    // g(m, p), N_d x N.
    CMat g(ndim, n);
    for (int m = 0; m < ndim; ++m) {
        for (int p = 0; p < n; ++p) {
            // phi = m/N_d + p/N is integer iff m*N + p*N_d == 0 mod N_d*N.
            const long long num =
                static_cast<long long>(m) * n + static_cast<long long>(p) * ndim;
            const long long den = static_cast<long long>(ndim) * n;
            Cplx geo;
            if (num % den == 0) {
                geo = dd;
            } else {
                const double phi = static_cast<double>(m) / dd +
                                   static_cast<double>(p) / nd;
                geo = std::polar(std::sin(std::numbers::pi * dd * phi) /
                                     std::sin(std::numbers::pi * phi),
                                 -std::numbers::pi * (dd - 1.0) * phi);
            }
            g(m, p) = phasor(-frac_turns(static_cast<long long>(k0) * p, n)) * geo;
        }
    }

    // DFT-domain twiddles E[q, u] = e^{-j2pi u q / N}.
    CMat e(n, n);
    for (int q = 0; q < n; ++q) {
        for (int u = 0; u < n; ++u) {
            const long long prod = (static_cast<long long>(q) * u) % n;
            e(q, u) = phasor(-static_cast<double>(prod) / nd);
        }
    }
    const CMat r_tab = g.conjugate() * e; // N_d x N

    CMat h_eff = CMat::Zero(ndim, ndim);
    CVec au(n);
    CVec dop(n);
    for (const auto &region : realization.regions) {
        for (const auto &cluster : region.clusters) {
            const double l_tot = cluster.delay_norm_total;
            for (int u = 0; u < n; ++u) {
                au(u) = phasor(-static_cast<double>(u) * l_tot / nd);
            }
            for (const auto &ray : cluster.rays) {
                for (int p = 0; p < n; ++p) {
                    const bool in_region =
                        p >= region.sample_begin && p < region.sample_end;
                    dop(p) = in_region
                                 ? phasor(ray.doppler_norm_total * p / nd)
                                 : Cplx(0.0, 0.0);
                }
                // L = (g .* dop-row-mask) * conj(E); L[m, u].
                const CMat l_tab = (g * dop.asDiagonal()) * e.conjugate();
                const Cplx pref = ray.gain / (nd * nd * dd);
                h_eff.noalias() +=
                    pref * (l_tab * au.asDiagonal() * r_tab.transpose());
            }
        }
    }
    return h_eff;
}

} // namespace

std::string waveform_name(WaveformKind kind) {
    switch (kind) {
    case WaveformKind::OFDM:
        return "ofdm";
    case WaveformKind::DFT_S_OFDM:
        return "dfts";
    case WaveformKind::AFDM:
        return "afdm";
    case WaveformKind::OTFS:
        return "otfs";
    }
    throw std::invalid_argument("waveform_name: unknown kind");
}

WaveformSpec WaveformSpec::ofdm(int n) {
    WaveformSpec spec;
    spec.kind = WaveformKind::OFDM;
    spec.frame_len = n;
    spec.validate();
    return spec;
}

WaveformSpec WaveformSpec::afdm(int n, int kmax) {
    WaveformSpec spec;
    spec.kind = WaveformKind::AFDM;
    spec.frame_len = n;
    spec.afdm_kmax = kmax;
    spec.afdm_c1 =
        static_cast<double>(2 * kmax + 1) / (2.0 * static_cast<double>(n));
    spec.afdm_c2 = 1.0 / (2.0 * static_cast<double>(n));
    spec.validate();
    return spec;
}

WaveformSpec WaveformSpec::otfs(int n, int delay_bins) {
    WaveformSpec spec;
    spec.kind = WaveformKind::OTFS;
    spec.frame_len = n;
    spec.otfs_delay_bins = delay_bins;
    spec.otfs_doppler_bins = (delay_bins > 0) ? n / delay_bins : 0;
    spec.validate();
    return spec;
}

WaveformSpec WaveformSpec::dfts(int n, int first_tone, int num_tones) {
    WaveformSpec spec;
    spec.kind = WaveformKind::DFT_S_OFDM;
    spec.frame_len = n;
    spec.dfts_first_tone = first_tone;
    spec.dfts_num_tones = num_tones;
    spec.validate();
    return spec;
}

void WaveformSpec::validate() const {
    if (frame_len < 1) {
        throw std::invalid_argument("WaveformSpec: frame_len must be >= 1");
    }
    switch (kind) {
    case WaveformKind::OFDM:
        break;
    case WaveformKind::AFDM: {
        if (afdm_kmax < 1) {
            throw std::invalid_argument("WaveformSpec: afdm_kmax must be >= 1");
        }
        const double c1 = static_cast<double>(2 * afdm_kmax + 1) /
                          (2.0 * static_cast<double>(frame_len));
        const double c2 = 1.0 / (2.0 * static_cast<double>(frame_len));
        if (std::abs(afdm_c1 - c1) > 1e-15 || std::abs(afdm_c2 - c2) > 1e-15) {
            throw std::invalid_argument(
                "WaveformSpec: AFDM chirp rates inconsistent with kmax");
        }
        break;
    }
    case WaveformKind::OTFS:
        if (otfs_delay_bins < 1 || otfs_doppler_bins < 1 ||
            otfs_delay_bins * otfs_doppler_bins != frame_len) {
            throw std::invalid_argument(
                "WaveformSpec: OTFS grid must satisfy M' * N' = N");
        }
        break;
    case WaveformKind::DFT_S_OFDM:
        if (dfts_num_tones < 1 || dfts_first_tone < 0 ||
            dfts_first_tone + dfts_num_tones > frame_len) {
            throw std::invalid_argument(
                "WaveformSpec: DFT-s tone allocation must fit in [0, N)");
        }
        break;
    }
}

int WaveformSpec::output_dim() const {
    return kind == WaveformKind::DFT_S_OFDM ? dfts_num_tones : frame_len;
}

CMat build_kernel(const WaveformSpec &spec) {
    spec.validate();
    const int n = spec.frame_len;
    switch (spec.kind) {
    case WaveformKind::OFDM:
        return dft_matrix(n);
    case WaveformKind::AFDM: {
        const CMat f = dft_matrix(n);
        CVec theta1(n);
        CVec theta2(n);
        const long long two_n = 2LL * n;
        const long long c1_num = 2LL * spec.afdm_kmax + 1;
        for (long long i = 0; i < n; ++i) {
            theta1(i) = phasor(-frac_turns(c1_num * i * i, two_n));
            theta2(i) = phasor(-frac_turns(i * i, two_n));
        }
        return theta2.asDiagonal() * f * theta1.asDiagonal();
    }
    case WaveformKind::OTFS: {
        const int mm = spec.otfs_delay_bins;
        const int nn = spec.otfs_doppler_bins;
        const CMat f = dft_matrix(nn);
        CMat a = CMat::Zero(n, n);
        for (int mu = 0; mu < nn; ++mu) {
            for (int lam = 0; lam < nn; ++lam) {
                for (int d = 0; d < mm; ++d) {
                    a(mu * mm + d, lam * mm + d) = f(mu, lam);
                }
            }
        }
        return a;
    }
    case WaveformKind::DFT_S_OFDM: {
        const CMat f = dft_matrix(n);
        const CMat despread = dft_matrix(spec.dfts_num_tones);
        return despread * f.middleRows(spec.dfts_first_tone, spec.dfts_num_tones);
    }
    }
    throw std::invalid_argument("build_kernel: unknown kind");
}

EffectiveChannel effective_channel(const ChannelMatrix &h,
                                   const WaveformSpec &spec) {
    spec.validate();
    if (h.size != spec.frame_len || h.entries.rows() != spec.frame_len ||
        h.entries.cols() != spec.frame_len) {
        throw std::invalid_argument("effective_channel: dimension mismatch");
    }
    const CMat a = build_kernel(spec);
    EffectiveChannel eff;
    eff.spec = spec;
    eff.matrix = a * h.entries * a.adjoint();
    eff.source = EffChanSource::triple_product;
    return eff;
}

EffectiveChannel effective_channel_entrywise(const ChannelRealization &realization,
                                             const WaveformSpec &spec) {
    spec.validate();
    if (realization.config.frame_len != spec.frame_len) {
        throw std::invalid_argument(
            "effective_channel_entrywise: dimension mismatch");
    }
    EffectiveChannel eff;
    eff.spec = spec;
    eff.source = EffChanSource::entry_formula;
    switch (spec.kind) {
    case WaveformKind::OFDM:
        eff.matrix = entrywise_chirped(realization, 0, 0);
        break;
    case WaveformKind::AFDM:
        eff.matrix =
            entrywise_chirped(realization, 2LL * spec.afdm_kmax + 1, 1);
        break;
    case WaveformKind::OTFS:
        eff.matrix = entrywise_otfs(realization, spec);
        break;
    case WaveformKind::DFT_S_OFDM:
        eff.matrix = entrywise_dfts(realization, spec);
        break;
    }
    return eff;
}

} // namespace waveformlab
