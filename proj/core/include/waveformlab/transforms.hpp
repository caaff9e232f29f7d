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

#include <string>

#include "waveformlab/operators.hpp"

namespace waveformlab {

enum class WaveformKind { OFDM, DFT_S_OFDM, AFDM, OTFS };

std::string waveform_name(WaveformKind kind);

// Waveform identity plus the parameters of its transform kernel. Exactly the
// group matching `kind` is meaningful; factory functions fill it in.
struct WaveformSpec {
    WaveformKind kind = WaveformKind::OFDM;
    int frame_len = 0; // N

    // AFDM chirp rates: c1 = (2*kmax + 1) / (2N), c2 = 1 / (2N).
    double afdm_c1 = 0.0;
    double afdm_c2 = 0.0;
    int afdm_kmax = 0;

    // OTFS delay-Doppler grid, delay_bins * doppler_bins = N.
    int otfs_delay_bins = 0;   // M'
    int otfs_doppler_bins = 0; // N'

    // DFT-s-OFDM localized allocation: tones [first_tone, first_tone + num_tones).
    int dfts_first_tone = 0; // k0
    int dfts_num_tones = 0;  // N_d

    static WaveformSpec ofdm(int n);
    static WaveformSpec afdm(int n, int kmax);
    static WaveformSpec otfs(int n, int delay_bins);
    static WaveformSpec dfts(int n, int first_tone, int num_tones);

    // Throws std::invalid_argument when the parameter group is inconsistent.
    void validate() const;

    // Symbol-domain dimension: N, except N_d for DFT-s-OFDM.
    int output_dim() const;
};

enum class EffChanSource { triple_product, entry_formula };

struct EffectiveChannel {
    WaveformSpec spec;
    CMat matrix; // N x N, or N_d x N_d for DFT-s-OFDM
    EffChanSource source = EffChanSource::triple_product;
};

// Transform kernel A. Square and unitary for OFDM/AFDM/OTFS; for DFT-s-OFDM
// the composite N_d x N map (tone selection of the DFT rows k0..k0+N_d-1
// followed by N_d-point despreading), which has orthonormal rows.
CMat build_kernel(const WaveformSpec &spec);

// H_eff = A H A^H. For DFT-s-OFDM this equals F_{N_d} H_K F_{N_d}^H with H_K
// the allocated-tone submatrix of F H F^H.
EffectiveChannel effective_channel(const ChannelMatrix &h,
                                   const WaveformSpec &spec);

// The same matrix evaluated from the realization parameters alone, as the
// per-ray sums over (region, cluster, ray, DFT indices) with the receive-time
// index restricted to each region's sample range. Cross-validates the
// assembled-matrix path.
EffectiveChannel effective_channel_entrywise(const ChannelRealization &realization,
                                             const WaveformSpec &spec);

} // namespace waveformlab
