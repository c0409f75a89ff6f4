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

#include "amtc/presence.hpp"

#include <algorithm>
#include <limits>

#include "amtc/error.hpp"

namespace amtc {

double ColumnRer(std::span<const double> column, std::size_t bin,
                 std::size_t delta_f) {
  const std::size_t bins = column.size();
  const std::size_t lo = bin > delta_f ? bin - delta_f : 0;
  const std::size_t hi = std::min(bins - 1, bin + delta_f);
  double background = 0.0;
  for (std::size_t m = 0; m < lo; ++m) background += column[m];
  for (std::size_t m = hi + 1; m < bins; ++m) background += column[m];
  const std::size_t count = bins - (hi - lo + 1);
  const double peak = column[bin];
  if (count == 0 || background <= 0.0) {
    return peak > 0.0 && count > 0 ? std::numeric_limits<double>::infinity()
                                   : 1.0;
  }
  return static_cast<double>(count) * peak / background;
}

std::vector<double> Rer(const Spectrogram& z, const Trace& trace,
                        std::size_t delta_f) {
  if (trace.size() != z.frames()) {
    throw InputError("dimension_mismatch",
                     "trace length does not match the spectrogram");
  }
  std::vector<double> out(z.frames());
  for (std::size_t n = 0; n < z.frames(); ++n) {
    if (trace[n] >= z.bins()) {
      throw InputError("out_of_range", "trace bin outside the spectrogram");
    }
    out[n] = ColumnRer(z.column(n), trace[n], delta_f);
  }
  return out;
}

VoicedMask Decide(std::span<const double> rers, double delta_rer) {
  VoicedMask mask(rers.size());
  for (std::size_t n = 0; n < rers.size(); ++n) mask[n] = rers[n] >= delta_rer;
  return mask;
}

namespace {

// Flips interior runs of `value` shorter than `limit` when both neighbours
// are runs of the opposite value.
void AbsorbShortRuns(VoicedMask& mask, bool value, std::size_t limit) {
  const std::size_t size = mask.size();
  std::size_t start = 0;
  while (start < size) {
    std::size_t end = start;
    while (end < size && mask[end] == mask[start]) ++end;
    const bool interior = start > 0 && end < size;
    if (mask[start] == value && interior && end - start < limit) {
      for (std::size_t i = start; i < end; ++i) mask[i] = !value;
    }
    start = end;
  }
}

}  // namespace

VoicedMask MergeSegments(const VoicedMask& mask, std::size_t delta1,
                         std::size_t delta2) {
  VoicedMask out = mask;
  AbsorbShortRuns(out, false, delta1);
  AbsorbShortRuns(out, true, delta2);
  return out;
}

PresenceResult DetectPresence(const Spectrogram& z, const Trace& trace,
                              const DetectionParams& params) {
  PresenceResult r;
  r.rer = Rer(z, trace, params.delta_f);
  r.raw = Decide(r.rer, params.delta_rer);
  r.mask = MergeSegments(r.raw, params.delta1, params.delta2);
  return r;
}

}  // namespace amtc
