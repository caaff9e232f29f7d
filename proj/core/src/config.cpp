// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "waveformlab/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace waveformlab {
namespace {

[[noreturn]] void fail(int line, const std::string &message) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " +
                                message);
}

std::string trim(const std::string &s) {
    const std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double_value(const std::string &value, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) fail(line, "malformed number '" + value + "'");
        return v;
    } catch (const std::invalid_argument &) {
        fail(line, "malformed number '" + value + "'");
    } catch (const std::out_of_range &) {
        fail(line, "number out of range '" + value + "'");
    }
}

long long parse_int_value(const std::string &value, int line) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) {
            fail(line, "malformed integer '" + value + "'");
        }
        return v;
    } catch (const std::invalid_argument &) {
        fail(line, "malformed integer '" + value + "'");
    } catch (const std::out_of_range &) {
        fail(line, "integer out of range '" + value + "'");
    }
}

std::vector<std::string> split_list(const std::string &value) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string waveform_list_string(const std::vector<WaveformKind> &kinds) {
    std::string out;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (i > 0) out += ",";
        out += waveform_name(kinds[i]);
    }
    return out;
}

std::string snr_grid_string(const std::vector<double> &grid) {
    std::string out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0) out += ",";
        out += format_double(grid[i]);
    }
    return out;
}

// Subcarrier spacings covered by the evaluation profiles; anything else is
// legal but flagged.
bool profiled_spacing(double hz) {
    for (double v : {500.0, 1000.0, 15000.0, 60000.0}) {
        if (hz == v) return true;
    }
    return false;
}

} // namespace

WaveformKind parse_waveform_name(const std::string &name) {
    if (name == "ofdm") return WaveformKind::OFDM;
    if (name == "dfts") return WaveformKind::DFT_S_OFDM;
    if (name == "afdm") return WaveformKind::AFDM;
    if (name == "otfs") return WaveformKind::OTFS;
    throw std::invalid_argument("unknown waveform '" + name +
                                "' (expected ofdm, dfts, afdm, otfs)");
}

std::string regime_name(Regime regime) {
    return regime == Regime::sparse ? "sparse" : "proposed";
}

Regime parse_regime_name(const std::string &name) {
    if (name == "sparse") return Regime::sparse;
    if (name == "proposed") return Regime::proposed;
    throw std::invalid_argument("unknown regime '" + name +
                                "' (expected sparse or proposed)");
}

std::string equalizer_name(Equalizer eq) {
    switch (eq) {
    case Equalizer::MMSE:
        return "mmse";
    case Equalizer::MRC:
        return "mrc";
    case Equalizer::MRC_SIC:
        return "mrc_sic";
    }
    return "mmse";
}

std::string csi_name(CsiMode csi) {
    return csi == CsiMode::perfect ? "perfect" : "estimated";
}

WaveformSpec make_waveform_spec(const ExperimentConfig &config,
                                WaveformKind kind) {
    const int n = config.channel.frame_len;
    switch (kind) {
    case WaveformKind::OFDM:
        return WaveformSpec::ofdm(n);
    case WaveformKind::AFDM:
        return WaveformSpec::afdm(n, config.afdm_kmax);
    case WaveformKind::OTFS:
        return WaveformSpec::otfs(n, config.otfs_delay_bins);
    case WaveformKind::DFT_S_OFDM: {
        const int tones =
            config.dfts_num_tones > 0 ? config.dfts_num_tones : n;
        return WaveformSpec::dfts(n, config.dfts_first_tone, tones);
    }
    }
    throw std::invalid_argument("unknown waveform kind");
}

ExperimentConfig parse_config(const std::string &text,
                              std::vector<std::string> *warnings) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "experiment" && section != "channel" &&
                section != "waveforms" && section != "link") {
                fail(line, "unknown section [" + section + "]");
            }
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            fail(line, "expected 'key = value'");
        }
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(line, "empty key");
        if (section.empty()) {
            fail(line, "key '" + key + "' appears before any [section]");
        }

        try {
            if (section == "experiment") {
                if (key == "scenario") {
                    cfg.scenario = value;
                } else if (key == "outdir") {
                    cfg.outdir = value;
                } else if (key == "regime") {
                    cfg.regime = parse_regime_name(value);
                } else {
                    fail(line, "unknown key '" + key + "' in [experiment]");
                }
            } else if (section == "channel") {
                ChannelConfig &ch = cfg.channel;
                if (key == "carrier_freq_hz") {
                    ch.carrier_freq_hz = parse_double_value(value, line);
                } else if (key == "bandwidth_hz") {
                    ch.bandwidth_hz = parse_double_value(value, line);
                } else if (key == "frame_len") {
                    ch.frame_len =
                        static_cast<int>(parse_int_value(value, line));
                } else if (key == "num_regions") {
                    ch.num_regions =
                        static_cast<int>(parse_int_value(value, line));
                } else if (key == "cluster_rate") {
                    ch.cluster_rate = parse_double_value(value, line);
                } else if (key == "ray_rate") {
                    ch.ray_rate = parse_double_value(value, line);
                } else if (key == "max_excess_delay_s") {
                    ch.max_excess_delay_s = parse_double_value(value, line);
                } else if (key == "rms_delay_spread_s") {
                    ch.rms_delay_spread_s = parse_double_value(value, line);
                } else if (key == "shadow_std_db") {
                    ch.shadow_std_db = parse_double_value(value, line);
                } else if (key == "speed_mps") {
                    ch.speed_mps = parse_double_value(value, line);
                } else if (key == "velocity_azimuth_rad") {
                    ch.velocity_azimuth_rad = parse_double_value(value, line);
                } else if (key == "cluster_sector_width_rad") {
                    ch.cluster_sector_width_rad =
                        parse_double_value(value, line);
                } else if (key == "vonmises_kappa") {
                    ch.vonmises_kappa = parse_double_value(value, line);
                } else if (key == "survival_prob") {
                    ch.survival_prob = parse_double_value(value, line);
                } else if (key == "rng_seed") {
                    ch.rng_seed = static_cast<std::uint64_t>(
                        parse_int_value(value, line));
                } else if (key == "subcarrier_spacing_hz") {
                    cfg.subcarrier_spacing_hz =
                        parse_double_value(value, line);
                } else {
                    fail(line, "unknown key '" + key + "' in [channel]");
                }
            } else if (section == "waveforms") {
                if (key == "list") {
                    cfg.waveforms.clear();
                    for (const std::string &name : split_list(value)) {
                        cfg.waveforms.push_back(parse_waveform_name(name));
                    }
                    if (cfg.waveforms.empty()) {
                        fail(line, "waveform list must not be empty");
                    }
                } else if (key == "afdm_kmax") {
                    cfg.afdm_kmax =
                        static_cast<int>(parse_int_value(value, line));
                } else if (key == "otfs_delay_bins") {
                    cfg.otfs_delay_bins =
                        static_cast<int>(parse_int_value(value, line));
                } else if (key == "dfts_first_tone") {
                    cfg.dfts_first_tone =
                        static_cast<int>(parse_int_value(value, line));
                } else if (key == "dfts_num_tones") {
                    cfg.dfts_num_tones =
                        static_cast<int>(parse_int_value(value, line));
                } else {
                    fail(line, "unknown key '" + key + "' in [waveforms]");
                }
            } else { // link
                LinkConfig &lk = cfg.link;
                if (key == "modulation_order") {
                    lk.modulation_order =
                        static_cast<int>(parse_int_value(value, line));
                } else if (key == "snr_grid_db") {
                    lk.snr_grid_db.clear();
                    for (const std::string &item : split_list(value)) {
                        lk.snr_grid_db.push_back(
                            parse_double_value(item, line));
                    }
                } else if (key == "num_trials") {
                    lk.num_trials =
                        static_cast<int>(parse_int_value(value, line));
                } else if (key == "equalizer") {
                    if (value == "mmse") {
                        lk.equalizer = Equalizer::MMSE;
                    } else if (value == "mrc") {
                        lk.equalizer = Equalizer::MRC;
                    } else if (value == "mrc_sic") {
                        lk.equalizer = Equalizer::MRC_SIC;
                    } else {
                        fail(line, "unknown equalizer '" + value + "'");
                    }
                } else if (key == "csi") {
                    if (value == "perfect") {
                        lk.csi = CsiMode::perfect;
                    } else if (value == "estimated") {
                        lk.csi = CsiMode::estimated;
                    } else {
                        fail(line, "unknown csi mode '" + value + "'");
                    }
                } else if (key == "pilot_spacing") {
                    lk.pilot_spacing =
                        static_cast<int>(parse_int_value(value, line));
                } else if (key == "target_ber") {
                    lk.target_ber = parse_double_value(value, line);
                } else if (key == "min_errors") {
                    lk.min_errors =
                        static_cast<int>(parse_int_value(value, line));
                } else {
                    fail(line, "unknown key '" + key + "' in [link]");
                }
            }
        } catch (const std::invalid_argument &e) {
            // Re-wrap enum/list errors that lack a line reference.
            const std::string what = e.what();
            if (what.rfind("config line", 0) == 0) throw;
            fail(line, what);
        }
    }

    cfg.channel.validate();
    if (warnings != nullptr && !profiled_spacing(cfg.subcarrier_spacing_hz)) {
        warnings->push_back(
            "subcarrier_spacing_hz = " +
            format_double(cfg.subcarrier_spacing_hz) +
            " is outside the profiled set {500, 1000, 15000, 60000}");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string &path,
                             std::vector<std::string> *warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), warnings);
}

std::string serialize_config(const ExperimentConfig &config) {
    std::ostringstream out;
    out << "[experiment]\n";
    out << "scenario = " << config.scenario << "\n";
    out << "outdir = " << config.outdir << "\n";
    out << "regime = " << regime_name(config.regime) << "\n";
    out << "\n[channel]\n";
    const ChannelConfig &ch = config.channel;
    out << "carrier_freq_hz = " << format_double(ch.carrier_freq_hz) << "\n";
    out << "bandwidth_hz = " << format_double(ch.bandwidth_hz) << "\n";
    out << "frame_len = " << ch.frame_len << "\n";
    out << "num_regions = " << ch.num_regions << "\n";
    out << "cluster_rate = " << format_double(ch.cluster_rate) << "\n";
    out << "ray_rate = " << format_double(ch.ray_rate) << "\n";
    out << "max_excess_delay_s = " << format_double(ch.max_excess_delay_s)
        << "\n";
    out << "rms_delay_spread_s = " << format_double(ch.rms_delay_spread_s)
        << "\n";
    out << "shadow_std_db = " << format_double(ch.shadow_std_db) << "\n";
    out << "speed_mps = " << format_double(ch.speed_mps) << "\n";
    out << "velocity_azimuth_rad = " << format_double(ch.velocity_azimuth_rad)
        << "\n";
    out << "cluster_sector_width_rad = "
        << format_double(ch.cluster_sector_width_rad) << "\n";
    out << "vonmises_kappa = " << format_double(ch.vonmises_kappa) << "\n";
    out << "survival_prob = " << format_double(ch.survival_prob) << "\n";
    out << "rng_seed = " << ch.rng_seed << "\n";
    out << "subcarrier_spacing_hz = "
        << format_double(config.subcarrier_spacing_hz) << "\n";
    out << "\n[waveforms]\n";
    out << "list = " << waveform_list_string(config.waveforms) << "\n";
    out << "afdm_kmax = " << config.afdm_kmax << "\n";
    out << "otfs_delay_bins = " << config.otfs_delay_bins << "\n";
    out << "dfts_first_tone = " << config.dfts_first_tone << "\n";
    out << "dfts_num_tones = " << config.dfts_num_tones << "\n";
    out << "\n[link]\n";
    const LinkConfig &lk = config.link;
    out << "modulation_order = " << lk.modulation_order << "\n";
    out << "snr_grid_db = " << snr_grid_string(lk.snr_grid_db) << "\n";
    out << "num_trials = " << lk.num_trials << "\n";
    out << "equalizer = " << equalizer_name(lk.equalizer) << "\n";
    out << "csi = " << csi_name(lk.csi) << "\n";
    out << "pilot_spacing = " << lk.pilot_spacing << "\n";
    out << "target_ber = " << format_double(lk.target_ber) << "\n";
    out << "min_errors = " << lk.min_errors << "\n";
    return out.str();
}

} // namespace waveformlab
