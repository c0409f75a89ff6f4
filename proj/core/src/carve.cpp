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

#include "amtc/carve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "amtc/error.hpp"

namespace amtc {

namespace {

bool IsLocalMin(std::span<const double> c, std::size_t m) {
  return m >= 1 && m + 1 < c.size() && c[m] < c[m - 1] && c[m] < c[m + 1];
}

// c[m] - c[m-1] has a strict local minimum at m.
bool IsBackwardDiffMin(std::span<const double> c, std::size_t m) {
  if (m < 2 || m + 1 >= c.size()) return false;
  const double here = c[m] - c[m - 1];
  return here < c[m - 1] - c[m - 2] && here < c[m + 1] - c[m];
}

// c[m+1] - c[m] has a strict local maximum at m.
bool IsForwardDiffMax(std::span<const double> c, std::size_t m) {
  if (m < 1 || m + 2 >= c.size()) return false;
  const double here = c[m + 1] - c[m];
  return here > c[m] - c[m - 1] && here > c[m + 2] - c[m + 1];
}

}  // namespace

std::pair<std::size_t, std::size_t> EffectivePeakBounds(
    std::span<const double> column, std::size_t peak) {
  const std::size_t bins = column.size();
  std::size_t m1 = peak;
  while (m1 > 0 && !IsLocalMin(column, m1) && !IsBackwardDiffMin(column, m1)) {
    --m1;
  }
  std::size_t m2 = peak;
  while (m2 + 1 < bins && !IsLocalMin(column, m2) &&
         !IsForwardDiffMax(column, m2)) {
    ++m2;
  }
  return {m1, m2};
}

double PeakVariance(std::span<const double> column, std::size_t peak,
                    std::size_t m1, std::size_t m2) {
  double mass = 0.0;
  double moment = 0.0;
  for (std::size_t m = m1; m <= m2; ++m) {
    const double d = static_cast<double>(m) - static_cast<double>(peak);
    mass += column[m];
    moment += column[m] * d * d;
  }
  if (m1 == m2 || !(mass > 0.0)) return kSigma2Floor;
  return std::max(kSigma2Floor, moment / mass);
}

EffectivePeak FindEffectivePeak(std::span<const double> column,
                                std::size_t peak) {
  const auto [m1, m2] = EffectivePeakBounds(column, peak);
  return EffectivePeak{m1, m2, PeakVariance(column, peak, m1, m2)};
}

EffectivePeak CompensateColumn(std::span<const double> in, std::size_t peak,
                               std::span<double> out) {
  const EffectivePeak ep = FindEffectivePeak(in, peak);
  const double denom = 2.0 * ep.sigma2;
  for (std::size_t m = 0; m < in.size(); ++m) {
    const double d = static_cast<double>(m) - static_cast<double>(peak);
    out[m] = (1.0 - std::exp(-(d * d) / denom)) * in[m];
  }
  return ep;
}

Spectrogram Compensate(const Spectrogram& z, const Trace& trace,
                       std::vector<EffectivePeak>* peaks) {
  if (trace.size() != z.frames()) {
    throw InputError("dimension_mismatch",
                     "trace length does not match the spectrogram");
  }
  Spectrogram out(z.bins(), z.frames(), z.freq_axis(), z.time_axis());
  if (peaks) peaks->resize(z.frames());
  for (std::size_t n = 0; n < z.frames(); ++n) {
    if (trace[n] >= z.bins()) {
      throw InputError("out_of_range", "trace bin outside the spectrogram");
    }
    const EffectivePeak ep = CompensateColumn(z.column(n), trace[n], out.column(n));
    if (peaks) (*peaks)[n] = ep;
  }
  return out;
}

double Mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

MultiTraceResult AmtcOffline(const Spectrogram& z, std::size_t num_traces,
                             std::span<const TransitionModel> models,
                             const DetectionParams& det,
                             std::span<const IterationConstraint> constraints,
                             const ConstraintOptions& constraint_options) {
  if (num_traces == 0) {
    throw InputError("bad_config", "number of traces must be at least 1");
  }
  if (models.empty() || (models.size() != 1 && models.size() != num_traces)) {
    throw InputError("bad_config",
                     "expected 1 or " + std::to_string(num_traces) +
                         " transition models, got " +
                         std::to_string(models.size()));
  }
  for (const auto& c : constraints) {
    if (c.iteration >= num_traces) {
      throw InputError("bad_constraint",
                       "constraint targets round " +
                           std::to_string(c.iteration) + " of " +
                           std::to_string(num_traces));
    }
  }

  MultiTraceResult result;
  result.freq_axis = z.freq_axis();
  Spectrogram current = z;
  for (std::size_t l = 0; l < num_traces; ++l) {
    const TransitionModel& model = models.size() == 1 ? models[0] : models[l];
    std::vector<ConstraintRegion> regions;
    for (const auto& c : constraints) {
      if (c.iteration == l) regions.push_back(c.region);
    }
    Trace trace = regions.empty()
                      ? TrackSingle(current, model)
                      : TrackConstrained(current, model, regions,
                                         constraint_options)
                            .trace;
    PresenceResult presence = DetectPresence(current, trace, det);
    result.mean_rer.push_back(Mean(presence.rer));
    result.rer.push_back(std::move(presence.rer));
    result.masks.push_back(std::move(presence.mask));
    if (l + 1 < num_traces) current = Compensate(current, trace);
    result.traces.push_back(std::move(trace));
  }
  return result;
}

MultiTraceResult AmtcOffline(const Spectrogram& z, std::size_t num_traces,
                             const TransitionModel& model,
                             const DetectionParams& det) {
  return AmtcOffline(z, num_traces, std::span<const TransitionModel>(&model, 1),
                     det);
}

std::size_t CountFromMeanRer(std::span<const double> mean_rer,
                             double rer_threshold) {
  for (std::size_t l = 0; l < mean_rer.size(); ++l) {
    if (mean_rer[l] < rer_threshold) return l;
  }
  return mean_rer.size();
}

std::size_t EstimateTraceCount(const Spectrogram& z, std::size_t max_traces,
                               double rer_threshold,
                               const TransitionModel& model,
                               const DetectionParams& det) {
  const MultiTraceResult r = AmtcOffline(z, max_traces, model, det);
  return CountFromMeanRer(r.mean_rer, rer_threshold);
}

}  // namespace amtc
