// Copyright 2026 The AMTC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>

#include "amtc/carve.hpp"
#include "amtc/online.hpp"
#include "amtc/spectrogram.hpp"
#include "amtc/synth.hpp"
#include "amtc/trace_dp.hpp"

namespace {

using namespace amtc;

Spectrogram Noise(std::size_t bins, std::size_t frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<> u(0.0, 1.0);
  Spectrogram z(bins, frames);
  for (std::size_t n = 0; n < frames; ++n) {
    for (double& v : z.column(n)) v = u(rng);
  }
  return z;
}

void BM_TrackSingle(benchmark::State& state) {
  const auto bins = static_cast<std::size_t>(state.range(0));
  const auto band = static_cast<std::size_t>(state.range(1));
  const Spectrogram z = Noise(bins, 1000, 1);
  const TransitionModel model = TransitionModel::UniformBand(band);
  for (auto _ : state) benchmark::DoNotOptimize(TrackSingle(z, model));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_TrackSingle)->Args({64, 2})->Args({256, 3})->Args({1167, 3})->Args({1167, 20});

void BM_AmtcOffline(benchmark::State& state) {
  const auto traces = static_cast<std::size_t>(state.range(0));
  const Spectrogram z = Noise(256, 500, 2);
  const TransitionModel model = TransitionModel::UniformBand(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(AmtcOffline(z, traces, model, DetectionParams{}));
  }
}
BENCHMARK(BM_AmtcOffline)->Arg(1)->Arg(2)->Arg(4);

// Steady-state cost of one streamed frame.
void BM_OnlinePush(benchmark::State& state) {
  const auto k2 = static_cast<std::size_t>(state.range(0));
  const Spectrogram z = Noise(256, 4000, 3);
  OnlineParams p;
  p.k2 = k2;
  p.num_traces = 2;
  OnlineTracker tracker(p, z.bins());
  std::size_t n = 0;
  for (; n < p.capacity(); ++n) tracker.Push(z.column(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tracker.Push(z.column(n % z.frames())));
    ++n;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_OnlinePush)->Arg(0)->Arg(50)->Arg(100);

void BM_Spectrogram(benchmark::State& state) {
  SynthConfig c;
  c.snr_db = -8.0;
  const TimeSeries ts = Synthesize(c).signal;
  StftConfig cfg;
  cfg.window_len_s = 10.0;
  cfg.overlap_fraction = 0.98;
  cfg.zero_pad_factor = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeSpectrogram(ts, cfg, {40.0, 240.0, 60.0}));
  }
}
BENCHMARK(BM_Spectrogram)->Arg(1)->Arg(35)->Unit(benchmark::kMillisecond);

void BM_Compensate(benchmark::State& state) {
  const Spectrogram z = Noise(1167, 851, 4);
  const Trace t = TrackSingle(z, TransitionModel::UniformBand(3));
  for (auto _ : state) benchmark::DoNotOptimize(Compensate(z, t));
}
BENCHMARK(BM_Compensate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
