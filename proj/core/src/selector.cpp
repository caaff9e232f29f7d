// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "waveformlab/selector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "waveformlab/linksim.hpp"
#include "waveformlab/metrics.hpp"

namespace waveformlab {

CellGrid make_cell_grid(int per_axis, double cell_radius_m,
                        double ref_snr_db) {
    if (per_axis < 1) throw std::invalid_argument("per_axis must be >= 1");
    if (cell_radius_m <= 0.0) {
        throw std::invalid_argument("cell_radius_m must be > 0");
    }
    CellGrid grid;
    grid.cell_radius_m = cell_radius_m;
    grid.ref_snr_db = ref_snr_db;
    for (int iy = 0; iy < per_axis; ++iy) {
        for (int ix = 0; ix < per_axis; ++ix) {
            // Cell-centered lattice spanning [-R, R] on both axes.
            const double x =
                cell_radius_m * (2.0 * (ix + 0.5) / per_axis - 1.0);
            const double y =
                cell_radius_m * (2.0 * (iy + 0.5) / per_axis - 1.0);
            if (std::hypot(x, y) <= cell_radius_m) {
                grid.positions.push_back({x, y});
            }
        }
    }
    return grid;
}

std::vector<double> gamma0_map(const CellGrid &grid) {
    if (grid.ref_distance_m <= 0.0) {
        throw std::invalid_argument("ref_distance_m must be > 0");
    }
    if (grid.pathloss_exponent <= 0.0) {
        throw std::invalid_argument("pathloss_exponent must be > 0");
    }
    std::vector<double> out;
    out.reserve(grid.positions.size());
    for (const CellPosition &p : grid.positions) {
        const double r =
            std::max(std::hypot(p.x_m, p.y_m), grid.ref_distance_m);
        out.push_back(grid.ref_snr_db -
                      10.0 * grid.pathloss_exponent *
                          std::log10(r / grid.ref_distance_m));
    }
    return out;
}

RateMap rate_map(const CellGrid &grid,
                 const std::vector<WaveformCellStats> &waveforms,
                 double bandwidth_hz, double target_ber) {
    if (waveforms.empty()) {
        throw std::invalid_argument("at least one waveform is required");
    }
    if (bandwidth_hz <= 0.0) {
        throw std::invalid_argument("bandwidth_hz must be > 0");
    }
    for (const WaveformCellStats &w : waveforms) {
        if (w.rho < 0.0) throw std::invalid_argument("rho must be >= 0");
        if (w.eta < 0.0 || w.eta > 1.0) {
            throw std::invalid_argument("eta must lie in [0, 1]");
        }
    }

    RateMap map;
    map.grid = grid;
    map.gamma0_db = gamma0_map(grid);
    map.waveforms = waveforms;
    map.points.assign(waveforms.size(), {});

    const std::size_t npos = grid.positions.size();
    for (std::size_t w = 0; w < waveforms.size(); ++w) {
        map.points[w].reserve(npos);
        for (std::size_t i = 0; i < npos; ++i) {
            const double gamma0 = std::pow(10.0, map.gamma0_db[i] / 10.0);
            const double gamma_eff =
                effective_sinr(gamma0, waveforms[w].rho);
            RatePoint pt;
            pt.gamma_eff_db = 10.0 * std::log10(std::max(gamma_eff, 1e-300));
            pt.rate_continuous_bps =
                bandwidth_hz * std::log2(1.0 + gamma_eff);
            for (int order : {256, 64, 16, 4}) {
                if (analytic_ber(gamma_eff, order) <= target_ber) {
                    pt.m_star = order;
                    break;
                }
            }
            pt.rate_discrete_bps =
                pt.m_star > 0 ? bandwidth_hz * waveforms[w].eta *
                                    std::log2(static_cast<double>(pt.m_star))
                              : 0.0;
            map.points[w].push_back(pt);
        }
    }

    map.winner.assign(npos, 0);
    for (std::size_t i = 0; i < npos; ++i) {
        int best = 0;
        for (std::size_t w = 1; w < waveforms.size(); ++w) {
            if (map.points[w][i].rate_discrete_bps >
                map.points[static_cast<std::size_t>(best)][i]
                    .rate_discrete_bps) {
                best = static_cast<int>(w);
            }
        }
        map.winner[i] = best;
    }
    return map;
}

WaveformRanking rank_waveforms(const RateMap &map,
                               double high_rate_threshold_bps) {
    if (map.points.empty() || map.grid.positions.empty()) {
        throw std::invalid_argument("rate map must not be empty");
    }
    const double npos = static_cast<double>(map.grid.positions.size());
    std::vector<WaveformRank> ranks;
    for (std::size_t w = 0; w < map.waveforms.size(); ++w) {
        WaveformRank r;
        r.kind = map.waveforms[w].kind;
        double sum = 0.0;
        int above = 0;
        for (const RatePoint &pt : map.points[w]) {
            sum += pt.rate_discrete_bps;
            if (pt.rate_discrete_bps >= high_rate_threshold_bps) ++above;
        }
        r.mean_rate_bps = sum / npos;
        r.high_rate_area = above / npos;
        ranks.push_back(r);
    }
    for (int winner : map.winner) {
        ++ranks[static_cast<std::size_t>(winner)].wins;
    }
    // Stable sort keeps declaration order on ties.
    std::stable_sort(ranks.begin(), ranks.end(),
                     [](const WaveformRank &a, const WaveformRank &b) {
                         return a.mean_rate_bps > b.mean_rate_bps;
                     });
    WaveformRanking ranking;
    ranking.ordered = std::move(ranks);
    return ranking;
}

} // namespace waveformlab
