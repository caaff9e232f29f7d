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
// Hot-path micro-benchmarks: dense channel assembly vs the FFT fast path,
// and the dense triple product vs the entrywise effective-channel formulas.

#include <benchmark/benchmark.h>

#include "waveformlab/linksim.hpp"
#include "waveformlab/operators.hpp"
#include "waveformlab/sparse_oracle.hpp"
#include "waveformlab/transforms.hpp"

namespace {

using namespace waveformlab;

ChannelConfig bench_config(int frame_len) {
    ChannelConfig cfg;
    cfg.frame_len = frame_len;
    cfg.num_regions = 2;
    cfg.cluster_rate = 6.0;
    cfg.ray_rate = 4.0;
    cfg.speed_mps = 100.0;
    cfg.max_excess_delay_s = 0.3e-6;
    cfg.survival_prob = 0.5;
    cfg.rng_seed = 42;
    return cfg;
}

void bm_assemble_global(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const ChannelRealization real = generate_realization(bench_config(n));
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_global(real));
    }
    state.SetComplexityN(n);
}
BENCHMARK(bm_assemble_global)->Range(64, 512)->Complexity();

void bm_apply_channel_dense(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const ChannelRealization real = generate_realization(bench_config(n));
    const ChannelMatrix h = assemble_global(real);
    const CVec x = CVec::Random(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize((h.entries * x).eval());
    }
}
BENCHMARK(bm_apply_channel_dense)->Range(64, 1024);

void bm_apply_channel_fft(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const ChannelRealization real = generate_realization(bench_config(n));
    const CVec x = CVec::Random(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_channel(real, x));
    }
}
BENCHMARK(bm_apply_channel_fft)->Range(64, 1024);

void bm_effective_triple(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const ChannelRealization real = generate_realization(bench_config(n));
    const ChannelMatrix h = assemble_global(real);
    const WaveformSpec spec = WaveformSpec::afdm(n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(effective_channel(h, spec));
    }
}
BENCHMARK(bm_effective_triple)->Range(64, 256);

void bm_effective_entrywise(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const ChannelRealization real = generate_realization(bench_config(n));
    const WaveformSpec spec = WaveformSpec::afdm(n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(effective_channel_entrywise(real, spec));
    }
}
BENCHMARK(bm_effective_entrywise)->Range(64, 256);

void bm_sparse_oracle(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    SparseChannelSpec spec;
    spec.waveform = WaveformSpec::otfs(n, n / 8);
    Pcg32 rng(7, 0);
    for (int c = 0; c < 8; ++c) {
        spec.taps.push_back({std::polar(0.35, rng.next_double() * 6.28),
                             static_cast<int>(rng.next_double() * 4),
                             static_cast<int>(rng.next_double() * 5) - 2});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(sparse_oracle_matrix(spec));
    }
}
BENCHMARK(bm_sparse_oracle)->Range(64, 512);

void bm_mmse_equalize(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const CMat h = CMat::Random(n, n);
    const CVec y = CVec::Random(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(equalize_mmse(h, y, 0.01));
    }
}
BENCHMARK(bm_mmse_equalize)->Range(64, 256);

} // namespace

BENCHMARK_MAIN();
