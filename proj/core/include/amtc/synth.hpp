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

// Ground-truth signal synthesis: phase-accumulated sinusoids with slowly
// varying frequency plus white Gaussian noise at a set SNR.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "amtc/spectrogram.hpp"

namespace amtc {

// Frequencies below are in the config's unit (units_per_hz per Hz).

// Per-sample Gaussian random walk, reflected at the band edges. A NaN start
// draws the start uniformly from the middle 80% of the band.
struct RandomWalkProcess {
  double start = std::numeric_limits<double>::quiet_NaN();
  double step_std = 0.005;
};

// f[n] - mean = sum_i coeffs[i] * (f[n-1-i] - mean) + e[n], e ~ N(0, noise_std^2),
// clipped to the band.
struct ArProcess {
  std::vector<double> coeffs;
  double noise_std = 0.0;
  double mean = std::numeric_limits<double>::quiet_NaN();
};

struct ConstantProcess {
  double freq = 0.0;
};

// Linear interpolation through (time_s, freq) knots, held flat outside.
struct PiecewiseProcess {
  std::vector<double> times_s;
  std::vector<double> freqs;
};

// Follows an earlier trace at a fixed frequency offset.
struct OffsetProcess {
  std::size_t reference = 0;
  double offset = 0.0;
};

using FrequencyProcess = std::variant<RandomWalkProcess, ArProcess,
                                      ConstantProcess, PiecewiseProcess,
                                      OffsetProcess>;

struct TraceSpec {
  FrequencyProcess process = RandomWalkProcess{};
  double amplitude = 1.0;
  // Sinusoid is silent for t in [first, second).
  std::optional<std::pair<double, double>> unvoiced;
};

struct SynthConfig {
  double duration_s = 180.0;
  double sample_rate_hz = 30.0;
  double units_per_hz = 60.0;
  double band_min = 40.0;
  double band_max = 240.0;
  std::vector<TraceSpec> traces{TraceSpec{}};
  // Total sinusoid power over noise power; +inf disables the noise. With no
  // traces the reference power is that of one unit sinusoid (0.5).
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
};

struct SynthResult {
  TimeSeries signal;
  // Per trace, per sample.
  std::vector<std::vector<double>> freq;
  std::vector<std::vector<bool>> voiced;
  double noise_variance = 0.0;
};

SynthResult Synthesize(const SynthConfig& cfg);

struct GroundTruth {
  // Per trace, per frame.
  std::vector<std::vector<double>> freq;
  std::vector<std::vector<bool>> voiced;

  std::size_t frames() const { return freq.empty() ? 0 : freq.front().size(); }
};

// Samples each trace at the centre sample of every STFT frame.
GroundTruth OnFrameGrid(const SynthResult& synth, const StftLayout& layout,
                        std::size_t frames);

// Main-lobe width of a rectangular window of `window_len_s` seconds, in
// frequency units: 2 / window_len_s Hz.
double MainLobeWidth(double window_len_s, double units_per_hz);

// Frequency offset that places two traces `trs` main-lobe widths apart.
double TrsOffset(double trs, double window_len_s, double units_per_hz);

}  // namespace amtc
