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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "amtc/spectrogram.hpp"
#include "amtc/trace_dp.hpp"

namespace amtc {

struct DetectionParams {
  double delta_rer = 2.41;
  // Half-width (bins) of the neighbourhood excluded from the background.
  std::size_t delta_f = 5;
  // Unvoiced gaps shorter than this between voiced runs are filled.
  std::size_t delta1 = 30;
  // Voiced blips shorter than this between unvoiced runs are removed.
  std::size_t delta2 = 30;

  bool operator==(const DetectionParams&) const = default;
};

using VoicedMask = std::vector<bool>;

// Relative energy ratio of one column: the trace bin's magnitude over the
// mean magnitude outside [bin - delta_f, bin + delta_f].
//   - background empty or all zero, peak zero  -> 1
//   - background all zero, peak positive       -> +inf
double ColumnRer(std::span<const double> column, std::size_t bin,
                 std::size_t delta_f);

std::vector<double> Rer(const Spectrogram& z, const Trace& trace,
                        std::size_t delta_f);

VoicedMask Decide(std::span<const double> rers, double delta_rer);

// Fills interior unvoiced runs shorter than delta1, then clears interior
// voiced runs shorter than delta2 (on the result of the first pass). Runs
// touching either end of the sequence are never changed.
VoicedMask MergeSegments(const VoicedMask& mask, std::size_t delta1,
                         std::size_t delta2);

struct PresenceResult {
  std::vector<double> rer;
  VoicedMask raw;
  VoicedMask mask;
};

// RER -> threshold -> segment merging.
PresenceResult DetectPresence(const Spectrogram& z, const Trace& trace,
                              const DetectionParams& params);

}  // namespace amtc
