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

// Offline multi-trace carving.
//
// Traces are extracted greedily: track the dominant trace, test its presence,
// then erase it from the spectrogram with a flipped Gaussian notch whose width
// follows the local peak shape, and repeat on the residual.

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "amtc/presence.hpp"
#include "amtc/spectrogram.hpp"
#include "amtc/trace_dp.hpp"

namespace amtc {

// Lower bound on the notch variance (bins^2).
inline constexpr double kSigma2Floor = 0.25;

struct EffectivePeak {
  std::size_t m1 = 0;
  std::size_t m2 = 0;
  double sigma2 = kSigma2Floor;
};

// Walks outward from `peak` to the nearest bin that is a strict local minimum
// of the column or a strict extremum of its first difference (minimum of the
// backward difference on the left, maximum of the forward difference on the
// right). The spectrum edge is used when nothing qualifies.
std::pair<std::size_t, std::size_t> EffectivePeakBounds(
    std::span<const double> column, std::size_t peak);

// Magnitude-weighted spread of the bins [m1, m2] around `peak`, floored at
// kSigma2Floor.
double PeakVariance(std::span<const double> column, std::size_t peak,
                    std::size_t m1, std::size_t m2);

EffectivePeak FindEffectivePeak(std::span<const double> column,
                                std::size_t peak);

// out[m] = (1 - exp(-(m - peak)^2 / (2 sigma2))) * in[m] over the whole
// column. `out` may alias `in`.
EffectivePeak CompensateColumn(std::span<const double> in, std::size_t peak,
                               std::span<double> out);

Spectrogram Compensate(const Spectrogram& z, const Trace& trace,
                       std::vector<EffectivePeak>* peaks = nullptr);

struct IterationConstraint {
  std::size_t iteration = 0;  // 0-based extraction round
  ConstraintRegion region;
};

struct MultiTraceResult {
  std::vector<Trace> traces;
  std::vector<VoicedMask> masks;
  std::vector<std::vector<double>> rer;
  std::vector<double> mean_rer;
  AxisMap freq_axis;

  std::size_t count() const { return traces.size(); }
};

// `models` holds either one model shared by all rounds or one per round.
MultiTraceResult AmtcOffline(const Spectrogram& z, std::size_t num_traces,
                             std::span<const TransitionModel> models,
                             const DetectionParams& det,
                             std::span<const IterationConstraint> constraints = {},
                             const ConstraintOptions& constraint_options = {});

MultiTraceResult AmtcOffline(const Spectrogram& z, std::size_t num_traces,
                             const TransitionModel& model,
                             const DetectionParams& det);

// Number of rounds before the mean RER first drops below `rer_threshold`,
// out of `max_traces` rounds.
std::size_t CountFromMeanRer(std::span<const double> mean_rer,
                             double rer_threshold);

std::size_t EstimateTraceCount(const Spectrogram& z, std::size_t max_traces,
                               double rer_threshold,
                               const TransitionModel& model,
                               const DetectionParams& det);

double Mean(std::span<const double> values);

}  // namespace amtc
