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

#include <Eigen/Dense>
#include <vector>

#include "waveformlab/chanmodel.hpp"

namespace waveformlab {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Discrete time-domain channel operator assembled from per-region sums of
// Doppler-modulated fractional delays. Piecewise circulant: row n is taken
// from the matrix of the region containing sample n.
struct ChannelMatrix {
    int size = 0;
    CMat entries;
    std::vector<CMat> region_matrices; // populated only when requested
};

// Unitary DFT, F[m, n] = e^{-j 2 pi m n / n} / sqrt(n).
CMat dft_matrix(int n);

// Fractional circular delay P(l) = F^H diag(e^{-j 2 pi m l / n}) F, evaluated
// in closed form as a circulant (Dirichlet-kernel columns). Unitary for every
// real l; the exact circular shift when l is an integer.
CMat frac_delay_operator(double l_tot, int n);

// First column pattern of P(l): kernel[d] = (1/n) sum_m e^{j 2 pi m (d-l)/n},
// so that P(l)[p, q] = kernel[(p - q) mod n].
CVec frac_delay_kernel(double l_tot, int n);

// Doppler modulation D(k) = diag(e^{j 2 pi k n' / n}).
CVec doppler_diag(double k_tot, int n);
CMat doppler_operator(double k_tot, int n);

// Dense per-region operator H_i = sum_{c,r} h_{c,r} D(k_tot) P(l_tot).
CMat assemble_region(const StationarityRegion &region, int n);

// Global operator H = sum_i W_i H_i with W_i the 0/1 row selector of region
// i's sample range. With keep_regions the per-region matrices are retained.
ChannelMatrix assemble_global(const ChannelRealization &realization,
                              bool keep_regions = false);

// FFT-based application paths; identical to the dense operators within
// 1e-10 but O(n log n) per cluster instead of O(n^2).
CVec apply_frac_delay(double l_tot, const CVec &x);
CVec apply_channel(const ChannelRealization &realization, const CVec &x);

} // namespace waveformlab
