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

// Near-real-time multi-trace tracking over a bounded window.
//
// Frame n is reported once frame n + k2 has arrived, using the window
// [n - k1, n + k2]. All per-layer state lives in fixed-capacity rings of
// k1 + k2 + 1 columns, so memory does not grow with the stream.
//
// Layer 0 accumulates over the whole stream: its newest column is the only
// one ever computed per frame, and the backtrack stops at the first frame
// where it agrees with the previous backtrack. Deeper layers work on the
// compensated window; they recompute only the columns downstream of a change
// while the window's left edge stays put, and re-seed at the left edge when
// it moves. Emitted estimates are therefore exactly those of re-solving the
// window from scratch at every step.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "amtc/presence.hpp"
#include "amtc/trace_dp.hpp"

namespace amtc {

struct OnlineParams {
  std::size_t k1 = 50;  // look-back (frames)
  std::size_t k2 = 100;  // look-ahead, i.e. output delay (frames)
  std::size_t num_traces = 1;
  // One model shared by all layers, or one per layer.
  std::vector<TransitionModel> models{TransitionModel::UniformBand(3)};
  DetectionParams det;

  std::size_t capacity() const { return k1 + k2 + 1; }
};

struct OnlineEstimate {
  std::size_t frame = 0;
  std::vector<std::size_t> bins;
  std::vector<bool> voiced;

  bool operator==(const OnlineEstimate&) const = default;
};

struct OnlineStats {
  // Backtrack steps taken by layer 0 on the most recent push.
  std::size_t last_backtrack_steps = 0;
  std::uint64_t backtrack_steps = 0;
  // Accumulated-map columns computed, all layers.
  std::uint64_t columns_accumulated = 0;
  std::uint64_t columns_compensated = 0;
};

class OnlineTracker {
 public:
  OnlineTracker(OnlineParams params, std::size_t bins);

  // Appends one frame; returns the estimate for frame (count - 1 - k2) once
  // that frame exists. Throws InputError on a length mismatch.
  std::optional<OnlineEstimate> Push(std::span<const double> frame);

  // Estimates for every frame not yet reported, in order. The tracker accepts
  // no further frames afterwards.
  std::vector<OnlineEstimate> Finalize();

  bool warming_up() const { return emitted_ == 0 && !finalized_; }
  std::size_t frames_received() const { return received_; }
  std::size_t frames_emitted() const { return emitted_; }
  std::size_t bins() const { return bins_; }
  std::size_t capacity() const { return params_.capacity(); }
  // Columns currently held per layer.
  std::size_t buffered_columns() const;
  const OnlineParams& params() const { return params_; }
  const OnlineStats& stats() const { return stats_; }

 private:
  struct Layer {
    std::vector<double> z;       // capacity * bins
    std::vector<double> g;       // capacity * bins
    std::vector<std::uint32_t> prev;
    std::vector<std::size_t> f;  // capacity
    std::vector<double> rer;     // capacity
    std::size_t seed = 0;        // window start G was last seeded at
    bool seeded = false;
  };

  static constexpr std::size_t kClean = static_cast<std::size_t>(-1);

  std::span<double> Col(std::vector<double>& v, std::size_t frame);
  std::span<const double> Col(const std::vector<double>& v,
                              std::size_t frame) const;
  const TransitionModel& ModelFor(std::size_t layer) const;

  // Brings every layer up to date for the window [tau1, tau2]. `z_dirty` is
  // the first layer-0 column that changed since the previous update.
  void Update(std::size_t tau1, std::size_t tau2, std::size_t z_dirty);
  OnlineEstimate Emit(std::size_t frame, std::size_t tau1, std::size_t tau2);

  OnlineParams params_;
  std::size_t bins_;
  std::vector<Layer> layers_;
  std::size_t received_ = 0;
  std::size_t emitted_ = 0;
  std::size_t window_start_ = 0;
  // One past the newest frame holding an estimate from an earlier update.
  std::size_t estimated_end_ = 0;
  bool finalized_ = false;
  OnlineStats stats_;
};

}  // namespace amtc
