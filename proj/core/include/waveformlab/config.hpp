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
#include <vector>

#include "waveformlab/linksim.hpp"

namespace waveformlab {

// A full experiment description: scenario label, channel, candidate
// waveforms with their shape parameters, link-level settings, output
// location, and the operating regime.
struct ExperimentConfig {
    std::string scenario = "default";
    std::string outdir = "out";
    Regime regime = Regime::proposed;

    ChannelConfig channel;
    double subcarrier_spacing_hz = 15e3;

    std::vector<WaveformKind> waveforms = {
        WaveformKind::OFDM, WaveformKind::DFT_S_OFDM, WaveformKind::AFDM,
        WaveformKind::OTFS};
    int afdm_kmax = 2;
    int otfs_delay_bins = 8;
    int dfts_first_tone = 0;
    int dfts_num_tones = 0; // 0 -> full allocation (frame_len tones)

    LinkConfig link; // link.waveform is filled per run
};

// Builds the concrete waveform spec for this experiment's frame length.
WaveformSpec make_waveform_spec(const ExperimentConfig &config,
                                WaveformKind kind);

// Parses the flat `key = value` format with [section] headers. Empty input
// yields the defaults above. Unknown sections/keys and malformed values
// raise std::invalid_argument with the offending line number; advisory
// notes (e.g. an unprofiled subcarrier spacing) are appended to `warnings`
// when the pointer is non-null.
ExperimentConfig parse_config(const std::string &text,
                              std::vector<std::string> *warnings = nullptr);

ExperimentConfig load_config(const std::string &path,
                             std::vector<std::string> *warnings = nullptr);

// Emits the full key set in a stable order; parse_config(serialize_config(c))
// reproduces c exactly (doubles are printed round-trip safe).
std::string serialize_config(const ExperimentConfig &config);

// Helpers shared with the CLI.
WaveformKind parse_waveform_name(const std::string &name);
std::string regime_name(Regime regime);
Regime parse_regime_name(const std::string &name);
std::string equalizer_name(Equalizer eq);
std::string csi_name(CsiMode csi);

} // namespace waveformlab
