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

#include "waveformlab/transforms.hpp"

namespace waveformlab {

// One resolvable tap of the downscaled channel: single region, one ray per
// cluster, integer delay/Doppler on the waveform grid.
struct SparseTap {
    std::complex<double> gain;
    int delay_int = 0;   // l_c in [0, N)
    int doppler_int = 0; // k_c (|k_c| <= kmax for AFDM)
};

struct SparseChannelSpec {
    std::vector<SparseTap> taps;
    WaveformSpec waveform; // carries frame_len plus the grid parameters
};

// Closed-form effective channels under the downscale premise. Each output
// has exactly one nonzero per row per tap (distinct shift signatures), with
// unit-modulus per-tap phase factors; agreement with the general paths to
// 1e-9 is the contract.
//
// sparse_afdm requires even N (the chirp-index reduction underlying the
// closed form holds only on even grids).
CMat sparse_afdm(const SparseChannelSpec &spec);
CMat sparse_ofdm(const SparseChannelSpec &spec);
CMat sparse_otfs(const SparseChannelSpec &spec);

// DFT-s-OFDM closed form in the allocated-tone domain (N_d x N_d): the
// despread symbol-domain matrix is F_{N_d} * sparse_dfts(...) * F_{N_d}^H.
CMat sparse_dfts(const SparseChannelSpec &spec);

// Dispatch on spec.waveform.kind. For DFT-s-OFDM the result is converted to
// the despread symbol domain so it is directly comparable with
// effective_channel output.
CMat sparse_oracle_matrix(const SparseChannelSpec &spec);

// Rounds one region's rays to the integer grid: delay to the nearest bin mod
// N, Doppler to the nearest bin (clamped to [-kmax, kmax] for AFDM).
SparseChannelSpec project_taps(const ChannelRealization &realization,
                               const WaveformSpec &waveform, int region_index);

// Ideal reference for the leakage split.
//  - region0: closed form from region-0 taps, extended over the full frame.
//  - per_region: integer-rounded taps per region assembled with the region
//    row selectors, then transformed (A Hint A^H).
enum class IdealRef { region0, per_region };

CMat ideal_reference(const ChannelRealization &realization,
                     const WaveformSpec &waveform,
                     IdealRef mode = IdealRef::region0);

} // namespace waveformlab
