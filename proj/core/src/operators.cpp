// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "waveformlab/operators.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "waveformlab/fft.hpp"

namespace waveformlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using Cplx = std::complex<double>;

void validate_delay(double l_tot, int n) {
    if (n < 1) {
        throw std::invalid_argument("frac_delay_operator: n must be >= 1");
    }
    if (!(l_tot >= 0.0) || !(l_tot < static_cast<double>(n))) {
        throw std::invalid_argument(
            "frac_delay_operator: l_tot must lie in [0, n)");
    }
}

} // namespace

CMat dft_matrix(int n) {
    if (n < 1) {
        throw std::invalid_argument("dft_matrix: n must be >= 1");
    }
    CMat f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m) {
        for (int col = 0; col < n; ++col) {
            // Reduce the index product mod n before forming the angle so
            // large n keeps full phase accuracy.
            const long long prod =
                (static_cast<long long>(m) * col) % n;
            f(m, col) = std::polar(
                scale, -kTwoPi * static_cast<double>(prod) / static_cast<double>(n));
        }
    }
    return f;
}

CVec frac_delay_kernel(double l_tot, int n) {
    validate_delay(l_tot, n);
    // Closed-form Dirichlet sum; N-periodic in d, so d in [0, n) suffices.
    CVec kernel(n);
    const double nd = static_cast<double>(n);
    for (int d = 0; d < n; ++d) {
        const double x = static_cast<double>(d) - l_tot;
        const double rounded = std::round(x);
        if (std::abs(x - rounded) < 1e-12) {
            // Integer offset: the sum collapses to a Kronecker delta
            // (|x| < n, so x ≡ 0 mod n only at x = 0).
            kernel(d) = (rounded == 0.0) ? 1.0 : 0.0;
            continue;
        }
        const double num = std::sin(std::numbers::pi * x);
        const double den = std::sin(std::numbers::pi * x / nd);
        const Cplx phase =
            std::polar(1.0, std::numbers::pi * x * (nd - 1.0) / nd);
        kernel(d) = phase * (num / den / nd);
    }
    return kernel;
}

CMat frac_delay_operator(double l_tot, int n) {
    const CVec kernel = frac_delay_kernel(l_tot, n);
    CMat p(n, n);
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            p(row, col) = kernel(((row - col) % n + n) % n);
        }
    }
    return p;
}

CVec doppler_diag(double k_tot, int n) {
    if (n < 1) {
        throw std::invalid_argument("doppler_diag: n must be >= 1");
    }
    CVec d(n);
    for (int i = 0; i < n; ++i) {
        d(i) = std::polar(1.0, kTwoPi * k_tot * static_cast<double>(i) /
                                   static_cast<double>(n));
    }
    return d;
}

CMat doppler_operator(double k_tot, int n) {
    return CMat(doppler_diag(k_tot, n).asDiagonal());
}

CMat assemble_region(const StationarityRegion &region, int n) {
    CMat h = CMat::Zero(n, n);
    for (const auto &cluster : region.clusters) {
        if (cluster.rays.empty()) {
            continue;
        }
        if (!(cluster.delay_norm_total >= 0.0) ||
            !(cluster.delay_norm_total < static_cast<double>(n))) {
            throw std::invalid_argument(
                "assemble_region: cluster delay outside [0, n)");
        }
        const CMat p = frac_delay_operator(cluster.delay_norm_total, n);
        for (const auto &ray : cluster.rays) {
            const CVec d = doppler_diag(ray.doppler_norm_total, n);
            // h += gain * D(k) * P(l); D is diagonal so this is row scaling.
            h.noalias() += ray.gain * (d.asDiagonal() * p);
        }
    }
    return h;
}

ChannelMatrix assemble_global(const ChannelRealization &realization,
                              bool keep_regions) {
    const int n = realization.config.frame_len;
    ChannelMatrix out;
    out.size = n;
    out.entries = CMat::Zero(n, n);

    int covered = 0;
    for (const auto &region : realization.regions) {
        if (region.sample_begin != covered || region.sample_end < region.sample_begin ||
            region.sample_end > n) {
            throw std::logic_error(
                "assemble_global: regions must partition [0, n)");
        }
        covered = region.sample_end;
        CMat hi = assemble_region(region, n);
        const int rows = region.sample_end - region.sample_begin;
        out.entries.middleRows(region.sample_begin, rows) =
            hi.middleRows(region.sample_begin, rows);
        if (keep_regions) {
            out.region_matrices.push_back(std::move(hi));
        }
    }
    if (covered != n) {
        throw std::logic_error("assemble_global: regions must cover [0, n)");
    }
    return out;
}

CVec apply_frac_delay(double l_tot, const CVec &x) {
    const int n = static_cast<int>(x.size());
    validate_delay(l_tot, n);
    CVec work = x;
    fft::forward(work.data(), n);
    for (int m = 0; m < n; ++m) {
        work(m) *= std::polar(1.0, -kTwoPi * static_cast<double>(m) * l_tot /
                                       static_cast<double>(n));
    }
    fft::inverse(work.data(), n);
    return work;
}

CVec apply_channel(const ChannelRealization &realization, const CVec &x) {
    const int n = realization.config.frame_len;
    if (static_cast<int>(x.size()) != n) {
        throw std::invalid_argument("apply_channel: dimension mismatch");
    }
    CVec y = CVec::Zero(n);
    for (const auto &region : realization.regions) {
        const int begin = region.sample_begin;
        const int len = region.sample_end - begin;
        if (len <= 0) {
            continue;
        }
        CVec yi = CVec::Zero(n);
        for (const auto &cluster : region.clusters) {
            // One FFT per cluster: rays share the cluster delay.
            const CVec delayed = apply_frac_delay(cluster.delay_norm_total, x);
            for (const auto &ray : cluster.rays) {
                const CVec d = doppler_diag(ray.doppler_norm_total, n);
                yi.noalias() += ray.gain * d.cwiseProduct(delayed);
            }
        }
        y.segment(begin, len) = yi.segment(begin, len);
    }
    return y;
}

} // namespace waveformlab
