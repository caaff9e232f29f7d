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

namespace waveformlab::fft {

// In-place unnormalized DFT: X[m] = sum_n x[n] e^{-j 2 pi m n / n}.
// Plans are cached per length and shared across threads; execution is
// thread-safe.
void forward(std::complex<double> *data, int n);

// In-place inverse DFT normalized by 1/n (forward followed by inverse is the
// identity).
void inverse(std::complex<double> *data, int n);

} // namespace waveformlab::fft
