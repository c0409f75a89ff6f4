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

// Declarative run configuration and the text formats shared by the
// command-line tool and the HTTP service. JSON handling stays behind this
// header; callers exchange plain strings.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "amtc/carve.hpp"
#include "amtc/metrics.hpp"
#include "amtc/online.hpp"
#include "amtc/presence.hpp"
#include "amtc/spectrogram.hpp"
#include "amtc/synth.hpp"
#include "amtc/trace_dp.hpp"

namespace amtc {

struct RunConfig {
  // Uniform band transition model.
  std::size_t band = 3;
  double lambda = 1.0;
  DetectionParams detection;
  std::size_t num_traces = 1;
  // Upper bound on rounds when estimating the number of traces.
  std::size_t max_traces = 4;
  ConstraintOptions constraints;
  std::size_t k1 = 50;
  std::size_t k2 = 100;
  StftConfig stft{10.0, 0.98, 35, 0, WindowShape::kRectangular};
  FrequencyRange range{40.0, 240.0, 60.0};
  double tau = kDefaultTau;
  SynthConfig synth;

  TransitionModel Model() const;
  OnlineParams Online() const;
};

// Throws InputError("bad_config") on malformed JSON, unknown keys, wrong
// types or values failing validation. Missing keys keep their defaults.
RunConfig ParseRunConfig(std::string_view json);
std::string SerializeRunConfig(const RunConfig& cfg);
RunConfig LoadRunConfig(const std::filesystem::path& path);
void ValidateRunConfig(const RunConfig& cfg);

// Constraint list: [{"frames":[a,b],"bins":[c,d],"iteration":i}, ...] with
// inclusive ranges and a 1-based extraction round (default 1).
std::vector<IterationConstraint> ParseConstraints(std::string_view json);
std::string SerializeConstraints(const std::vector<IterationConstraint>& cs);

std::string ResultToJson(const MultiTraceResult& result);
std::string MetricReportToJson(const MetricReport& report);
// One NDJSON record without the trailing newline.
std::string EstimateToJson(const OnlineEstimate& est, const AxisMap& freq_axis);
std::string ErrorToJson(std::string_view code, std::string_view message);

// Trace CSV: "frame,bin,freq_physical,voiced".
struct TraceTable {
  std::vector<std::size_t> bins;
  std::vector<double> freq;
  VoicedMask voiced;
};
void WriteTraceCsv(std::ostream& out, const Trace& trace, const VoicedMask& mask,
                   const AxisMap& freq_axis);
TraceTable ReadTraceCsv(std::istream& in);
TraceTable LoadTraceCsv(const std::filesystem::path& path);

// Ground-truth CSV: "frame,time_s,freq_0,voiced_0,freq_1,voiced_1,...".
void WriteGroundTruthCsv(std::ostream& out, const GroundTruth& gt,
                         const AxisMap& time_axis);
GroundTruth ReadGroundTruthCsv(std::istream& in);
GroundTruth LoadGroundTruthCsv(const std::filesystem::path& path);

}  // namespace amtc
