// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "waveformlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace waveformlab::fft {

namespace {

// FFTW plan creation is not thread-safe; execution via the new-array
// interface is. One in-place plan pair per transform length, created lazily
// under a mutex and kept for the process lifetime.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;

PlanPair &plans_for(int n) {
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) {
        return it->second;
    }
    // FFTW_UNALIGNED lets the cached plan execute on arbitrary caller
    // buffers; FFTW_ESTIMATE keeps planning cheap and deterministic.
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
    auto *buf = reinterpret_cast<fftw_complex *>(scratch.data());
    PlanPair pair;
    pair.fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    pair.bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (pair.fwd == nullptr || pair.bwd == nullptr) {
        throw std::runtime_error("fft: FFTW plan creation failed");
    }
    return cache.emplace(n, pair).first->second;
}

} // namespace

void forward(std::complex<double> *data, int n) {
    if (n < 1) {
        throw std::invalid_argument("fft::forward: length must be >= 1");
    }
    if (n == 1) {
        return;
    }
    auto *buf = reinterpret_cast<fftw_complex *>(data);
    fftw_execute_dft(plans_for(n).fwd, buf, buf);
}

void inverse(std::complex<double> *data, int n) {
    if (n < 1) {
        throw std::invalid_argument("fft::inverse: length must be >= 1");
    }
    if (n == 1) {
        return;
    }
    auto *buf = reinterpret_cast<fftw_complex *>(data);
    fftw_execute_dft(plans_for(n).bwd, buf, buf);
    const double scale = 1.0 / static_cast<double>(n);
    for (int i = 0; i < n; ++i) {
        data[i] *= scale;
    }
}

} // namespace waveformlab::fft
