// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------
//
// Command-line front end. Subcommands cover the full pipeline: channel
// generation, effective channels, leakage metrics, link-level BER/SE/PAPR,
// and the cell-level rate map / waveform selection. Every run writes its
// outputs plus a manifest with content hashes, so identical (config, seed)
// pairs reproduce byte-identical files.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "waveformlab/config.hpp"
#include "waveformlab/io.hpp"
#include "waveformlab/selector.hpp"

namespace fs = std::filesystem;
using namespace waveformlab;

namespace {

// ------------------------------------------------------------------------
// Shared run context
// ------------------------------------------------------------------------

struct RunContext {
    ExperimentConfig cfg;
    fs::path dir;
    io::Manifest manifest;

    explicit RunContext(ExperimentConfig config) : cfg(std::move(config)) {
        dir = fs::path(cfg.outdir);
        fs::create_directories(dir);
        manifest.seed = cfg.channel.rng_seed;
        manifest.config_hash = io::blob_sha1(serialize_config(cfg));
    }

    std::string path(const std::string &name) const {
        return (dir / name).string();
    }

    void record(const std::string &name) {
        manifest.outputs[name] = io::blob_sha1_file(path(name));
    }

    void finish() {
        io::write_manifest(path("manifest.json"), manifest);
        std::cout << "wrote " << path("manifest.json") << "\n";
    }

    ChannelSource source() const {
        return ChannelSource{cfg.channel, cfg.regime, cfg.channel.rng_seed};
    }

    // Operating-point inputs shared by several subcommands.
    RegimeIndicators indicators() const {
        const ChannelConfig &ch = cfg.channel;
        const double t_stat =
            frame_duration_s(ch) / std::max(1, ch.num_regions);
        return regime_indicators(ch.speed_mps, ch.carrier_freq_hz,
                                 ch.bandwidth_hz, cfg.subcarrier_spacing_hz,
                                 ch.max_excess_delay_s, t_stat,
                                 ch.cluster_sector_width_rad);
    }
};

double db10(double v) {
    return 10.0 * std::log10(std::max(v, 1e-300));
}

// ------------------------------------------------------------------------
// Subcommands
// ------------------------------------------------------------------------

void cmd_generate(RunContext &run) {
    const ChannelRealization real = draw_channel(run.source(), 0);
    io::save_ray_records(run.path("rays.txt"), io::ray_records(real));
    run.record("rays.txt");
}

void cmd_effchan(RunContext &run) {
    const ChannelRealization real = draw_channel(run.source(), 0);
    const ChannelMatrix h = assemble_global(real);
    io::save_matrix(run.path("channel.bin"), h.entries);
    run.record("channel.bin");
    for (WaveformKind kind : run.cfg.waveforms) {
        const WaveformSpec spec = make_waveform_spec(run.cfg, kind);
        const EffectiveChannel eff = effective_channel(h, spec);
        const std::string name =
            "heff_" + std::string(waveform_name(kind)) + ".bin";
        io::save_matrix(run.path(name), eff.matrix);
        run.record(name);
    }
}

void cmd_metrics(RunContext &run) {
    const RegimeIndicators ind = run.indicators();
    const ChannelRealization real = draw_channel(run.source(), 0);
    const ChannelMatrix h = assemble_global(real);

    // Operating SNR: the top of the configured grid.
    const double snr_db = run.cfg.link.snr_grid_db.empty()
                              ? 30.0
                              : run.cfg.link.snr_grid_db.back();
    const double noise_var = std::pow(10.0, -snr_db / 10.0);

    io::CsvWriter csv(run.path("metrics.csv"),
                      {"waveform", "seed", "gamma_id_db", "rho",
                       "gamma_eff_db", "ber_analytic", "chi_tau", "chi_nu",
                       "chi_stat", "delta_l_sym"});
    for (WaveformKind kind : run.cfg.waveforms) {
        const WaveformSpec spec = make_waveform_spec(run.cfg, kind);
        const CMat h_eff = effective_channel(h, spec).matrix;
        const CMat h_id = ideal_reference(real, spec);
        LeakageReport rep = leakage_split(h_eff, h_id, 1.0);
        double mm = 0.0;
        if (run.cfg.link.csi == CsiMode::estimated) {
            Pcg32 rng(mix_key(run.cfg.channel.rng_seed, 0x6d65ULL), 0);
            const ChannelEstimate est = estimate_channel_simple(
                h_eff, spec, 0.0, rng, run.cfg.link.pilot_spacing);
            mm = mismatch_energy(h_eff, est.h_eff_hat) / spec.output_dim();
        }
        rep = finalize_report(rep, mm, noise_var);
        csv.row({waveform_name(kind),
                 std::to_string(run.cfg.channel.rng_seed),
                 io::format_double(db10(rep.gamma_id)),
                 io::format_double(rep.rho),
                 io::format_double(db10(rep.gamma_eff)),
                 io::format_double(analytic_ber(
                     rep.gamma_eff, run.cfg.link.modulation_order)),
                 io::format_double(ind.chi_tau),
                 io::format_double(ind.chi_nu),
                 io::format_double(ind.chi_stat),
                 io::format_double(ind.delta_l_sym)});
    }
    csv.close();
    run.record("metrics.csv");
}

void cmd_ber(RunContext &run) {
    for (WaveformKind kind : run.cfg.waveforms) {
        LinkConfig link = run.cfg.link;
        link.waveform = make_waveform_spec(run.cfg, kind);
        const LinkReport report = run_ber(link, run.source());
        const std::string name =
            "ber_" + std::string(waveform_name(kind)) + ".csv";
        io::CsvWriter csv(run.path(name),
                          {"snr_db", "ber_mc", "ber_ci_low", "ber_ci_high",
                           "ber_analytic"});
        for (const SnrPointReport &row : report.rows) {
            csv.row_values({row.snr_db, row.ber_mc, row.ber_ci_low,
                            row.ber_ci_high, row.ber_analytic});
        }
        csv.close();
        run.record(name);
    }
}

void cmd_se(RunContext &run) {
    const RegimeIndicators ind = run.indicators();
    for (WaveformKind kind : run.cfg.waveforms) {
        const WaveformSpec spec = make_waveform_spec(run.cfg, kind);
        const double eta = overhead_eta(spec, ind.chi_tau, ind.chi_nu,
                                        run.cfg.link.pilot_spacing);
        const double rho = mean_rho(run.source(), spec, run.cfg.link.csi, 50,
                                    run.cfg.link.pilot_spacing);
        const std::string name =
            "se_" + std::string(waveform_name(kind)) + ".csv";
        io::CsvWriter csv(run.path(name), {"snr_db", "se"});
        for (double snr_db : run.cfg.link.snr_grid_db) {
            const double gamma_id = std::pow(10.0, snr_db / 10.0);
            const double gamma_eff = effective_sinr(gamma_id, rho);
            csv.row_values({snr_db,
                            spectral_efficiency(
                                gamma_eff, run.cfg.link.target_ber, eta)});
        }
        csv.close();
        run.record(name);
    }
}

void cmd_papr(RunContext &run) {
    std::vector<double> thresholds;
    for (double t = 0.0; t <= 14.0 + 1e-9; t += 0.25) thresholds.push_back(t);
    const int frames = std::max(2000, run.cfg.link.num_trials);
    for (WaveformKind kind : run.cfg.waveforms) {
        const WaveformSpec spec = make_waveform_spec(run.cfg, kind);
        const auto ccdf = measure_papr(
            spec, run.cfg.link.modulation_order, frames, 4,
            run.cfg.channel.rng_seed, thresholds, run.cfg.link.num_threads);
        const std::string name =
            "papr_" + std::string(waveform_name(kind)) + ".csv";
        io::CsvWriter csv(run.path(name), {"papr_db", "ccdf"});
        for (const PaprCcdfPoint &pt : ccdf) {
            csv.row_values({pt.threshold_db, pt.prob});
        }
        csv.close();
        run.record(name);
    }
}

RateMap build_rate_map(RunContext &run, int rho_ensemble) {
    const RegimeIndicators ind = run.indicators();
    std::vector<WaveformCellStats> stats;
    for (WaveformKind kind : run.cfg.waveforms) {
        const WaveformSpec spec = make_waveform_spec(run.cfg, kind);
        WaveformCellStats s;
        s.kind = kind;
        s.rho = mean_rho(run.source(), spec, run.cfg.link.csi, rho_ensemble,
                         run.cfg.link.pilot_spacing);
        s.eta = overhead_eta(spec, ind.chi_tau, ind.chi_nu,
                             run.cfg.link.pilot_spacing);
        stats.push_back(s);
    }
    const CellGrid grid = make_cell_grid(41, 500.0, 30.0);
    return rate_map(grid, stats, run.cfg.channel.bandwidth_hz,
                    run.cfg.link.target_ber);
}

void cmd_ratemap(RunContext &run) {
    const RateMap map = build_rate_map(run, 100);
    std::vector<std::string> columns = {"x_m", "y_m", "gamma0_db"};
    for (const WaveformCellStats &w : map.waveforms) {
        const std::string base = waveform_name(w.kind);
        columns.push_back(base + "_gamma_eff_db");
        columns.push_back(base + "_rate_bps");
        columns.push_back(base + "_m_star");
    }
    columns.push_back("winner");
    io::CsvWriter csv(run.path("ratemap.csv"), columns);
    for (std::size_t i = 0; i < map.grid.positions.size(); ++i) {
        std::vector<std::string> cells = {
            io::format_double(map.grid.positions[i].x_m),
            io::format_double(map.grid.positions[i].y_m),
            io::format_double(map.gamma0_db[i])};
        for (std::size_t w = 0; w < map.waveforms.size(); ++w) {
            const RatePoint &pt = map.points[w][i];
            cells.push_back(io::format_double(pt.gamma_eff_db));
            cells.push_back(io::format_double(pt.rate_discrete_bps));
            cells.push_back(std::to_string(pt.m_star));
        }
        cells.push_back(waveform_name(
            map.waveforms[static_cast<std::size_t>(map.winner[i])].kind));
        csv.row(cells);
    }
    csv.close();
    run.record("ratemap.csv");
}

void cmd_select(RunContext &run) {
    const RateMap map = build_rate_map(run, 100);
    // "High rate" = at least 2 bit/s/Hz delivered over the cell bandwidth.
    const WaveformRanking ranking =
        rank_waveforms(map, 2.0 * run.cfg.channel.bandwidth_hz);
    io::CsvWriter csv(run.path("ranking.csv"),
                      {"rank", "waveform", "mean_rate_bps", "high_rate_area",
                       "wins"});
    for (std::size_t i = 0; i < ranking.ordered.size(); ++i) {
        const WaveformRank &r = ranking.ordered[i];
        csv.row({std::to_string(i + 1), waveform_name(r.kind),
                 io::format_double(r.mean_rate_bps),
                 io::format_double(r.high_rate_area), std::to_string(r.wins)});
    }
    csv.close();
    run.record("ranking.csv");
}

void cmd_table1(RunContext &run) {
    io::CsvWriter csv(
        run.path("table1.csv"),
        {"speed_kmh", "f_d_hz", "l_max_b20", "l_max_b100", "k_max_df500",
         "k_max_df60k", "delta_l_sym_df500_b20", "delta_l_sym_df500_b100",
         "delta_l_sym_df60k_b20", "delta_l_sym_df60k_b100"});
    for (const Table1Row &r : table1_rows()) {
        csv.row_values({r.speed_kmh, r.f_d_hz, r.l_max_b20, r.l_max_b100,
                        r.k_max_df500, r.k_max_df60k,
                        r.delta_l_sym_df500_b20, r.delta_l_sym_df500_b100,
                        r.delta_l_sym_df60k_b20, r.delta_l_sym_df60k_b100});
    }
    csv.close();
    run.record("table1.csv");
}

// ------------------------------------------------------------------------
// Option plumbing
// ------------------------------------------------------------------------

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char *env = std::getenv("WAVEFORMLAB_THREADS")) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(env, &used);
            if (used != std::string(env).size() || v < 1) {
                throw std::invalid_argument("");
            }
            return v;
        } catch (const std::exception &) {
            throw std::invalid_argument(
                "WAVEFORMLAB_THREADS must be a positive integer");
        }
    }
    return 1;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"waveformlab — doubly dispersive channels and waveform "
                 "selection"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string outdir;
    int threads = 0;
    std::string regime_str;
    app.add_option("--config", config_path, "Experiment config file")
        ->check(CLI::ExistingFile);
    CLI::Option *seed_opt =
        app.add_option("--seed", seed, "Override the channel RNG seed");
    app.add_option("--out", outdir, "Output directory (overrides config)");
    app.add_option("--threads", threads,
                   "Worker threads (default: WAVEFORMLAB_THREADS or 1)");
    CLI::Option *regime_opt =
        app.add_option("--regime", regime_str,
                       "Operating regime (overrides config)")
            ->check(CLI::IsMember({"sparse", "proposed"}));

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"generate", "Draw a channel realization and dump its ray records"},
        {"effchan", "Assemble H and the per-waveform effective channels"},
        {"metrics", "Leakage split, effective SINR, and regime indicators"},
        {"ber", "Monte Carlo bit error rate sweep"},
        {"se", "Spectral efficiency over the SNR grid"},
        {"papr", "PAPR CCDF per waveform"},
        {"ratemap", "Cell-level rate map"},
        {"select", "Rank waveforms by cell-level rate"},
        {"table1", "Mobility operating-point table"},
    };
    for (const auto &[name, help] : commands) {
        app.add_subcommand(name, help)->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        std::vector<std::string> warnings;
        ExperimentConfig cfg = config_path.empty()
                                   ? parse_config("", &warnings)
                                   : load_config(config_path, &warnings);
        if (seed_opt->count() > 0) cfg.channel.rng_seed = seed;
        if (!outdir.empty()) cfg.outdir = outdir;
        if (regime_opt->count() > 0) cfg.regime = parse_regime_name(regime_str);
        cfg.link.num_threads = resolve_threads(threads);
        for (const std::string &w : warnings) {
            std::cerr << "warning: " << w << "\n";
        }

        RunContext run(cfg);
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "generate") {
            cmd_generate(run);
        } else if (sub == "effchan") {
            cmd_effchan(run);
        } else if (sub == "metrics") {
            cmd_metrics(run);
        } else if (sub == "ber") {
            cmd_ber(run);
        } else if (sub == "se") {
            cmd_se(run);
        } else if (sub == "papr") {
            cmd_papr(run);
        } else if (sub == "ratemap") {
            cmd_ratemap(run);
        } else if (sub == "select") {
            cmd_select(run);
        } else if (sub == "table1") {
            cmd_table1(run);
        }
        run.finish();
        return 0;
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
