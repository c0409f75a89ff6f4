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

// Error measures for single- and multi-trace estimates.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "amtc/presence.hpp"
#include "amtc/spectrogram.hpp"
#include "amtc/trace_dp.hpp"

namespace amtc {

inline constexpr double kDefaultTau = 0.03;
// Relative deviation above which a frame counts as a gross error.
inline constexpr double kGrossThreshold = 0.20;

struct SingleMetrics {
  double rmse = 0.0;   // frequency units
  double erate = 0.0;  // mean relative deviation
  double ecount = 0.0; // fraction of frames with relative deviation > tau
};

// Throws InputError on a length mismatch or a nonpositive truth value.
SingleMetrics ComputeSingleMetrics(std::span<const double> est,
                                   std::span<const double> truth,
                                   double tau = kDefaultTau);

std::vector<double> TraceFrequencies(const Trace& trace, const AxisMap& axis);

// Sample correlation. Throws on fewer than two samples or zero variance.
double Pearson(std::span<const double> a, std::span<const double> b);

struct MultiMetrics {
  // confusion[i][j]: fraction of frames with i voiced true traces reported
  // as j voiced estimates, i != j. Diagonal entries stay 0. At least 3x3.
  std::vector<std::vector<double>> confusion;
  double gross = 0.0;
  // Per true trace: mean relative deviation over the frames where counts
  // match, no deviation is gross and that trace is voiced.
  std::vector<double> fine_per_trace;
  double fine = 0.0;
  double total = 0.0;

  double error(std::size_t truth_count, std::size_t est_count) const;
};

// Frequencies are per trace, per frame; a trace counts on a frame when its
// mask is set there.
MultiMetrics ComputeMultiMetrics(
    const std::vector<std::vector<double>>& est_freq,
    const std::vector<VoicedMask>& est_voiced,
    const std::vector<std::vector<double>>& truth_freq,
    const std::vector<VoicedMask>& truth_voiced);

// Area under the ROC curve of `scores` separating positive from negative
// labels, ties counted half. Throws if either class is empty.
double RocAuc(std::span<const double> scores, const std::vector<bool>& labels);

struct MetricReport {
  double tau = kDefaultTau;
  SingleMetrics single;
  std::optional<double> pearson;
  std::optional<MultiMetrics> multi;
};

}  // namespace amtc
