// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "waveformlab/sparse_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace waveformlab {

namespace {

using Cplx = std::complex<double>;

Cplx phasor(double turns) {
    return std::polar(1.0, 2.0 * std::numbers::pi * turns);
}

double frac_turns(long long num, long long den) {
    return static_cast<double>(((num % den) + den) % den) /
           static_cast<double>(den);
}

int wrap(long long v, int modulus) {
    return static_cast<int>(((v % modulus) + modulus) % modulus);
}

// Nearest integer with the half-point assigned downward, so the residual
// fraction lies in (-1/2, 1/2].
long long nearest_int(double x) {
    return static_cast<long long>(std::ceil(x - 0.5));
}

void check_taps(const SparseChannelSpec &spec, WaveformKind expected) {
    if (spec.waveform.kind != expected) {
        throw std::invalid_argument("sparse oracle: waveform kind mismatch");
    }
    spec.waveform.validate();
    for (const auto &tap : spec.taps) {
        if (tap.delay_int < 0 || tap.delay_int >= spec.waveform.frame_len) {
            throw std::invalid_argument("sparse oracle: delay_int outside [0, N)");
        }
    }
}

} // namespace

CMat sparse_ofdm(const SparseChannelSpec &spec) {
    check_taps(spec, WaveformKind::OFDM);
    const int n = spec.waveform.frame_len;
    CMat h = CMat::Zero(n, n);
    for (const auto &tap : spec.taps) {
        for (int col = 0; col < n; ++col) {
            const int row = wrap(static_cast<long long>(col) + tap.doppler_int, n);
            h(row, col) += tap.gain *
                           phasor(-frac_turns(static_cast<long long>(col) *
                                                  tap.delay_int, n));
        }
    }
    return h;
}

CMat sparse_afdm(const SparseChannelSpec &spec) {
    check_taps(spec, WaveformKind::AFDM);
    const int n = spec.waveform.frame_len;
    if (n % 2 != 0) {
        throw std::invalid_argument(
            "sparse_afdm: closed form requires even frame length");
    }
    const int kmax = spec.waveform.afdm_kmax;
    const long long two_n = 2LL * n;
    const long long c1_num = 2LL * kmax + 1;
    CMat h = CMat::Zero(n, n);
    for (const auto &tap : spec.taps) {
        if (std::abs(tap.doppler_int) > kmax) {
            throw std::invalid_argument(
                "sparse_afdm: |doppler_int| must not exceed kmax");
        }
        const long long l = tap.delay_int;
        // Unit-modulus delay factor common to the whole tap diagonal, plus a
        // column-dependent delay ramp.
        const double l_chirp = frac_turns(c1_num * l * l, two_n);
        for (int m = 0; m < n; ++m) {
            const int col =
                wrap(static_cast<long long>(m) - tap.doppler_int + c1_num * l, n);
            const double turns =
                -frac_turns(static_cast<long long>(m) * m, two_n) +
                frac_turns(static_cast<long long>(col) * col, two_n) + l_chirp -
                frac_turns(static_cast<long long>(col) * l, n);
            h(m, col) += tap.gain * phasor(turns);
        }
    }
    return h;
}

CMat sparse_otfs(const SparseChannelSpec &spec) {
    check_taps(spec, WaveformKind::OTFS);
    const int n = spec.waveform.frame_len;
    const int mm = spec.waveform.otfs_delay_bins;
    const int nn = spec.waveform.otfs_doppler_bins;
    CMat h = CMat::Zero(n, n);
    for (const auto &tap : spec.taps) {
        const int l = tap.delay_int;
        const int k = tap.doppler_int;
        for (int a = 0; a < mm; ++a) {
            const int b = wrap(static_cast<long long>(a) - l, mm);
            // Delay-axis wrap count; integer because a - b - l ≡ 0 (mod M').
            const long long s = (static_cast<long long>(l) - a + b) / mm;
            for (int mu = 0; mu < nn; ++mu) {
                const int nu = wrap(static_cast<long long>(mu) - k, nn);
                const double turns =
                    frac_turns(static_cast<long long>(k) * a, n) -
                    frac_turns(static_cast<long long>(nu) * s, nn);
                h(mu * mm + a, nu * mm + b) += tap.gain * phasor(turns);
            }
        }
    }
    return h;
}

CMat sparse_dfts(const SparseChannelSpec &spec) {
    check_taps(spec, WaveformKind::DFT_S_OFDM);
    const int n = spec.waveform.frame_len;
    const int nd = spec.waveform.dfts_num_tones;
    const int k0 = spec.waveform.dfts_first_tone;
    CMat h = CMat::Zero(nd, nd);
    for (const auto &tap : spec.taps) {
        for (int col = 0; col < nd; ++col) {
            const int row = wrap(static_cast<long long>(col) + tap.doppler_int, nd);
            h(row, col) += tap.gain *
                           phasor(-frac_turns(static_cast<long long>(k0 + col) *
                                                  tap.delay_int, n));
        }
    }
    return h;
}

CMat sparse_oracle_matrix(const SparseChannelSpec &spec) {
    switch (spec.waveform.kind) {
    case WaveformKind::OFDM:
        return sparse_ofdm(spec);
    case WaveformKind::AFDM:
        return sparse_afdm(spec);
    case WaveformKind::OTFS:
        return sparse_otfs(spec);
    case WaveformKind::DFT_S_OFDM: {
        const CMat tone = sparse_dfts(spec);
        const CMat f = dft_matrix(spec.waveform.dfts_num_tones);
        return f * tone * f.adjoint();
    }
    }
    throw std::invalid_argument("sparse_oracle_matrix: unknown kind");
}

SparseChannelSpec project_taps(const ChannelRealization &realization,
                               const WaveformSpec &waveform, int region_index) {
    if (region_index < 0 ||
        region_index >= static_cast<int>(realization.regions.size())) {
        throw std::invalid_argument("project_taps: region index out of range");
    }
    const int n = waveform.frame_len;
    SparseChannelSpec spec;
    spec.waveform = waveform;
    const auto &region = realization.regions[static_cast<std::size_t>(region_index)];
    for (const auto &cluster : region.clusters) {
        const int l_int = wrap(nearest_int(cluster.delay_norm_total), n);
        for (const auto &ray : cluster.rays) {
            SparseTap tap;
            tap.gain = ray.gain;
            tap.delay_int = l_int;
            long long k_int = nearest_int(ray.doppler_norm_total);
            if (waveform.kind == WaveformKind::AFDM) {
                const long long kmax = waveform.afdm_kmax;
                k_int = std::clamp(k_int, -kmax, kmax);
            }
            tap.doppler_int = static_cast<int>(k_int);
            spec.taps.push_back(tap);
        }
    }
    return spec;
}

CMat ideal_reference(const ChannelRealization &realization,
                     const WaveformSpec &waveform, IdealRef mode) {
    if (mode == IdealRef::region0) {
        return sparse_oracle_matrix(project_taps(realization, waveform, 0));
    }
    // per_region: round every region's taps on the grid, keep the region
    // row-selector structure, and transform the assembled matrix.
    ChannelRealization rounded = realization;
    const int n = waveform.frame_len;
    for (auto &region : rounded.regions) {
        for (auto &cluster : region.clusters) {
            cluster.delay_norm_total =
                static_cast<double>(wrap(nearest_int(cluster.delay_norm_total), n));
            for (auto &ray : cluster.rays) {
                ray.doppler_norm_total =
                    static_cast<double>(nearest_int(ray.doppler_norm_total));
                ray.delay_offset_norm = 0.0;
            }
        }
    }
    return effective_channel(assemble_global(rounded), waveform).matrix;
}

} // namespace waveformlab
