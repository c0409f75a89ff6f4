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

// Command implementations shared by the `amtc` executable, the HTTP service
// and the tests.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amtc/carve.hpp"
#include "amtc/io.hpp"
#include "amtc/spectrogram.hpp"

namespace amtc::tool {

enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitComputation = 3 };

// Maps an exception to its exit code and writes the error JSON to `err`.
int ReportError(std::ostream& err);

enum class PayloadKind { kAuto, kAudio, kSpectrogram };

PayloadKind ParsePayloadKind(std::string_view name);

// Audio (WAV or CSV) is transformed with the configured STFT; a spectrogram
// CSV is used as is. kAuto looks at the content: RIFF magic means WAV, a
// six-field first row means a spectrogram CSV, anything else audio CSV.
Spectrogram SpectrogramFromBytes(std::string_view bytes, PayloadKind kind,
                                 const RunConfig& cfg, double csv_rate_hz = 0.0);
Spectrogram SpectrogramFromFile(const std::filesystem::path& path,
                                PayloadKind kind, const RunConfig& cfg,
                                double csv_rate_hz = 0.0);

// Offline multi-trace tracking with the configured model and detection
// parameters. With `estimate_count`, the number of traces comes from the
// mean-RER stopping rule over at most cfg.max_traces rounds.
MultiTraceResult Track(const Spectrogram& z, const RunConfig& cfg,
                       std::size_t num_traces,
                       std::span<const IterationConstraint> constraints = {},
                       bool estimate_count = false);

// Entry point of the command-line tool; returns the exit code.
int Run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace amtc::tool
