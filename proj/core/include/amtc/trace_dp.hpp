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

// Regularized single-trace tracking by dynamic programming.
//
// A trace assigns one frequency bin to each frame. The tracker maximises
//
//   sum_n Z(f(n), n) + lambda * (log P(f(1)) + sum_n log P(f(n) | f(n-1)))
//
// by forward accumulation of the best regularized energy ending in each
// (bin, frame) cell, followed by a backtrack from the best final cell.
//
// Conventions: bins and frames are 0-based. Every argmax tie resolves to the
// lowest bin. A zero transition probability is stored as -inf and never wins.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "amtc/error.hpp"
#include "amtc/spectrogram.hpp"

namespace amtc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// lambda * log_p, except that a forbidden (-inf) transition stays forbidden
// even for lambda == 0.
inline double Regularize(double lambda, double log_p) {
  return log_p == kNegInf ? kNegInf : lambda * log_p;
}

class TransitionModel {
 public:
  enum class Kind { kUniformBand, kExplicitMatrix };

  // Uniform random walk: P(m | m') = 1/(2k+1) for |m - m'| <= k. Rows clipped
  // at the spectrum edges are not renormalised. An empty `log_prior` means a
  // uniform prior over however many bins the spectrogram has.
  static TransitionModel UniformBand(std::size_t k, double lambda = 1.0,
                                     std::vector<double> log_prior = {});

  // `log_trans` is row-major M x M with entry [from * M + to].
  static TransitionModel ExplicitMatrix(std::vector<double> log_prior,
                                        std::vector<double> log_trans,
                                        double lambda = 1.0);

  Kind kind() const { return kind_; }
  std::size_t band() const { return band_; }
  double lambda() const { return lambda_; }
  const std::vector<double>& log_prior() const { return log_prior_; }
  const std::vector<double>& log_trans() const { return log_trans_; }

  TransitionModel WithLambda(double lambda) const;

  double LogPrior(std::size_t bin, std::size_t bins) const;
  double LogTransition(std::size_t from, std::size_t to, std::size_t bins) const;

  // Throws InputError("dimension_mismatch") when the model cannot be used on
  // a spectrogram with `bins` rows.
  void Validate(std::size_t bins) const;

  bool operator==(const TransitionModel&) const = default;

 private:
  Kind kind_ = Kind::kUniformBand;
  std::size_t band_ = 0;
  double lambda_ = 1.0;
  std::vector<double> log_prior_;
  std::vector<double> log_trans_;
};

struct Trace {
  std::vector<std::size_t> bins;

  std::size_t size() const { return bins.size(); }
  std::size_t operator[](std::size_t n) const { return bins[n]; }
  bool operator==(const Trace&) const = default;
};

// Accumulated regularized maximum-energy map together with the best
// predecessor bin of every cell (unused in column 0).
struct AccumulatedMap {
  std::size_t bins = 0;
  std::size_t frames = 0;
  std::vector<double> values;
  std::vector<std::uint32_t> argmax_prev;

  double operator()(std::size_t bin, std::size_t frame) const {
    return values[frame * bins + bin];
  }
  std::uint32_t prev(std::size_t bin, std::size_t frame) const {
    return argmax_prev[frame * bins + bin];
  }
};

// Column primitives shared by the offline and streaming trackers.
void SeedColumn(std::span<const double> z, const TransitionModel& model,
                std::span<double> g_out);
void AdvanceColumn(std::span<const double> g_prev, std::span<const double> z,
                   const TransitionModel& model, std::span<double> g_out,
                   std::span<std::uint32_t> prev_out);
// Lowest index of the maximum entry.
std::size_t ArgmaxLowest(std::span<const double> values);

AccumulatedMap Accumulate(const Spectrogram& z, const TransitionModel& model);
Trace Backtrack(const AccumulatedMap& map);
Trace TrackSingle(const Spectrogram& z, const TransitionModel& model);

// Frames [first_frame, last_frame] with an inclusive bin range per frame.
struct ConstraintRegion {
  std::size_t first_frame = 0;
  std::size_t last_frame = 0;
  std::vector<std::size_t> bin_lo;
  std::vector<std::size_t> bin_hi;

  static ConstraintRegion Rectangle(std::size_t first_frame,
                                    std::size_t last_frame, std::size_t bin_lo,
                                    std::size_t bin_hi);
  // Cells with ((n-cn)/rn)^2 + ((m-cm)/rm)^2 <= 1, clipped to the matrix.
  static ConstraintRegion Ellipse(double center_frame, double center_bin,
                                  double radius_frames, double radius_bins,
                                  std::size_t bins, std::size_t frames);

  bool Contains(std::size_t bin, std::size_t frame) const;
  // True when the trace visits the region on at least one frame.
  bool PassedBy(const Trace& trace) const;
  void Validate(std::size_t bins, std::size_t frames) const;

  bool operator==(const ConstraintRegion&) const = default;
};

struct ConstraintOptions {
  double scale = 2.0;
  unsigned max_rounds = 32;
};

struct ConstrainedTrack {
  Trace trace;
  unsigned rounds = 0;
};

class ConstraintUnsatisfiedError : public ComputationError {
 public:
  ConstraintUnsatisfiedError(Trace last, unsigned rounds);
  const Trace& last_trace() const { return last_; }
  unsigned rounds() const { return rounds_; }

 private:
  Trace last_;
  unsigned rounds_;
};

// Re-solves with the entries of every still-missed region multiplied by
// `scale` until the trace passes through all regions. Throws
// ConstraintUnsatisfiedError after `max_rounds` scalings.
ConstrainedTrack TrackConstrained(const Spectrogram& z,
                                  const TransitionModel& model,
                                  std::span<const ConstraintRegion> regions,
                                  const ConstraintOptions& options = {});

}  // namespace amtc
