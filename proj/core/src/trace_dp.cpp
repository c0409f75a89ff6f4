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

#include "amtc/trace_dp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace amtc {

namespace {

constexpr double kSumTolerance = 1e-9;

double LogSumExp(std::span<const double> v) {
  double hi = kNegInf;
  for (double x : v) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

}  // namespace

TransitionModel TransitionModel::UniformBand(std::size_t k, double lambda,
                                             std::vector<double> log_prior) {
  if (!(lambda >= 0.0)) {
    throw InputError("bad_config", "lambda must be nonnegative");
  }
  TransitionModel m;
  m.kind_ = Kind::kUniformBand;
  m.band_ = k;
  m.lambda_ = lambda;
  m.log_prior_ = std::move(log_prior);
  return m;
}

TransitionModel TransitionModel::ExplicitMatrix(std::vector<double> log_prior,
                                                std::vector<double> log_trans,
                                                double lambda) {
  if (!(lambda >= 0.0)) {
    throw InputError("bad_config", "lambda must be nonnegative");
  }
  TransitionModel m;
  m.kind_ = Kind::kExplicitMatrix;
  m.lambda_ = lambda;
  m.log_prior_ = std::move(log_prior);
  m.log_trans_ = std::move(log_trans);
  m.Validate(m.log_prior_.size());
  return m;
}

TransitionModel TransitionModel::WithLambda(double lambda) const {
  TransitionModel copy = *this;
  copy.lambda_ = lambda;
  return copy;
}

double TransitionModel::LogPrior(std::size_t bin, std::size_t bins) const {
  if (log_prior_.empty()) return -std::log(static_cast<double>(bins));
  return log_prior_[bin];
}

double TransitionModel::LogTransition(std::size_t from, std::size_t to,
                                      std::size_t bins) const {
  if (kind_ == Kind::kExplicitMatrix) return log_trans_[from * bins + to];
  const std::size_t d = from > to ? from - to : to - from;
  if (d > band_) return kNegInf;
  return -std::log(static_cast<double>(2 * band_ + 1));
}

void TransitionModel::Validate(std::size_t bins) const {
  if (bins == 0) throw InputError("dimension_mismatch", "model has no bins");
  if (!log_prior_.empty()) {
    if (log_prior_.size() != bins) {
      throw InputError("dimension_mismatch",
                       "prior has " + std::to_string(log_prior_.size()) +
                           " entries, spectrogram has " + std::to_string(bins) +
                           " bins");
    }
    if (std::abs(std::exp(LogSumExp(log_prior_)) - 1.0) > kSumTolerance) {
      throw InputError("bad_model", "prior does not sum to 1");
    }
  }
  if (kind_ == Kind::kExplicitMatrix) {
    if (log_prior_.size() != bins || log_trans_.size() != bins * bins) {
      throw InputError("dimension_mismatch",
                       "explicit transition model does not match " +
                           std::to_string(bins) + " bins");
    }
    for (std::size_t from = 0; from < bins; ++from) {
      const std::span<const double> row(log_trans_.data() + from * bins, bins);
      if (std::abs(std::exp(LogSumExp(row)) - 1.0) > kSumTolerance) {
        throw InputError("bad_model", "transition row " + std::to_string(from) +
                                          " does not sum to 1");
      }
    }
  }
}

std::size_t ArgmaxLowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

void SeedColumn(std::span<const double> z, const TransitionModel& model,
                std::span<double> g_out) {
  const std::size_t bins = z.size();
  for (std::size_t m = 0; m < bins; ++m) {
    g_out[m] = z[m] + Regularize(model.lambda(), model.LogPrior(m, bins));
  }
}

void AdvanceColumn(std::span<const double> g_prev, std::span<const double> z,
                   const TransitionModel& model, std::span<double> g_out,
                   std::span<std::uint32_t> prev_out) {
  const std::size_t bins = z.size();
  if (model.kind() == TransitionModel::Kind::kUniformBand) {
    // Every in-band transition carries the same weight, so the band max is
    // taken on G alone and the constant is added once.
    const std::size_t k = model.band();
    const double step = Regularize(
        model.lambda(), -std::log(static_cast<double>(2 * k + 1)));
    for (std::size_t m = 0; m < bins; ++m) {
      const std::size_t lo = m > k ? m - k : 0;
      const std::size_t hi = std::min(bins - 1, m + k);
      std::size_t best = lo;
      for (std::size_t p = lo + 1; p <= hi; ++p) {
        if (g_prev[p] > g_prev[best]) best = p;
      }
      prev_out[m] = static_cast<std::uint32_t>(best);
      g_out[m] = g_prev[best] + step + z[m];
    }
    return;
  }
  const double lambda = model.lambda();
  const auto& trans = model.log_trans();
  for (std::size_t m = 0; m < bins; ++m) {
    std::size_t best = 0;
    double best_v = g_prev[0] + Regularize(lambda, trans[m]);
    for (std::size_t p = 1; p < bins; ++p) {
      const double v = g_prev[p] + Regularize(lambda, trans[p * bins + m]);
      if (v > best_v) {
        best_v = v;
        best = p;
      }
    }
    prev_out[m] = static_cast<std::uint32_t>(best);
    g_out[m] = best_v + z[m];
  }
}

AccumulatedMap Accumulate(const Spectrogram& z, const TransitionModel& model) {
  if (z.empty()) {
    throw InputError("dimension_mismatch", "spectrogram is empty");
  }
  model.Validate(z.bins());
  AccumulatedMap map;
  map.bins = z.bins();
  map.frames = z.frames();
  map.values.assign(map.bins * map.frames, 0.0);
  map.argmax_prev.assign(map.bins * map.frames, 0);

  const std::size_t bins = map.bins;
  SeedColumn(z.column(0), model, std::span<double>(map.values.data(), bins));
  for (std::size_t n = 1; n < map.frames; ++n) {
    AdvanceColumn(
        std::span<const double>(map.values.data() + (n - 1) * bins, bins),
        z.column(n), model, std::span<double>(map.values.data() + n * bins, bins),
        std::span<std::uint32_t>(map.argmax_prev.data() + n * bins, bins));
  }
  return map;
}

Trace Backtrack(const AccumulatedMap& map) {
  Trace trace;
  trace.bins.resize(map.frames);
  if (map.frames == 0) return trace;
  const std::size_t last = map.frames - 1;
  trace.bins[last] = ArgmaxLowest(
      std::span<const double>(map.values.data() + last * map.bins, map.bins));
  for (std::size_t n = last; n > 0; --n) {
    trace.bins[n - 1] = map.prev(trace.bins[n], n);
  }
  return trace;
}

Trace TrackSingle(const Spectrogram& z, const TransitionModel& model) {
  return Backtrack(Accumulate(z, model));
}

ConstraintRegion ConstraintRegion::Rectangle(std::size_t first_frame,
                                             std::size_t last_frame,
                                             std::size_t bin_lo,
                                             std::size_t bin_hi) {
  if (last_frame < first_frame || bin_hi < bin_lo) {
    throw InputError("bad_constraint", "constraint ranges must be ordered");
  }
  ConstraintRegion r;
  r.first_frame = first_frame;
  r.last_frame = last_frame;
  r.bin_lo.assign(last_frame - first_frame + 1, bin_lo);
  r.bin_hi.assign(last_frame - first_frame + 1, bin_hi);
  return r;
}

ConstraintRegion ConstraintRegion::Ellipse(double center_frame,
                                           double center_bin,
                                           double radius_frames,
                                           double radius_bins, std::size_t bins,
                                           std::size_t frames) {
  if (!(radius_frames > 0.0) || !(radius_bins > 0.0) || bins == 0 ||
      frames == 0) {
    throw InputError("bad_constraint", "ellipse radii must be positive");
  }
  ConstraintRegion r;
  bool started = false;
  const auto n_lo = static_cast<long>(std::ceil(center_frame - radius_frames));
  const auto n_hi = static_cast<long>(std::floor(center_frame + radius_frames));
  for (long n = std::max(0L, n_lo);
       n <= std::min(static_cast<long>(frames) - 1, n_hi); ++n) {
    const double u = (static_cast<double>(n) - center_frame) / radius_frames;
    const double half = radius_bins * std::sqrt(std::max(0.0, 1.0 - u * u));
    const long lo = std::max(0L, static_cast<long>(std::ceil(center_bin - half)));
    const long hi = std::min(static_cast<long>(bins) - 1,
                             static_cast<long>(std::floor(center_bin + half)));
    if (lo > hi) {
      if (started) break;
      continue;
    }
    if (!started) {
      r.first_frame = static_cast<std::size_t>(n);
      started = true;
    }
    r.last_frame = static_cast<std::size_t>(n);
    r.bin_lo.push_back(static_cast<std::size_t>(lo));
    r.bin_hi.push_back(static_cast<std::size_t>(hi));
  }
  if (!started) {
    throw InputError("bad_constraint", "ellipse covers no cell");
  }
  return r;
}

bool ConstraintRegion::Contains(std::size_t bin, std::size_t frame) const {
  if (frame < first_frame || frame > last_frame) return false;
  const std::size_t i = frame - first_frame;
  return bin >= bin_lo[i] && bin <= bin_hi[i];
}

bool ConstraintRegion::PassedBy(const Trace& trace) const {
  for (std::size_t n = first_frame; n <= last_frame && n < trace.size(); ++n) {
    if (Contains(trace[n], n)) return true;
  }
  return false;
}

void ConstraintRegion::Validate(std::size_t bins, std::size_t frames) const {
  const std::size_t span = last_frame - first_frame + 1;
  if (last_frame < first_frame || bin_lo.size() != span ||
      bin_hi.size() != span) {
    throw InputError("bad_constraint", "malformed constraint region");
  }
  if (last_frame >= frames) {
    throw InputError("bad_constraint",
                     "constraint frames exceed the spectrogram");
  }
  for (std::size_t i = 0; i < span; ++i) {
    if (bin_lo[i] > bin_hi[i] || bin_hi[i] >= bins) {
      throw InputError("bad_constraint",
                       "constraint bins exceed the spectrogram");
    }
  }
}

ConstraintUnsatisfiedError::ConstraintUnsatisfiedError(Trace last,
                                                       unsigned rounds)
    : ComputationError("constraint_unsatisfiable",
                       "trace still misses the constraint region after " +
                           std::to_string(rounds) + " scaling rounds"),
      last_(std::move(last)),
      rounds_(rounds) {}

ConstrainedTrack TrackConstrained(const Spectrogram& z,
                                  const TransitionModel& model,
                                  std::span<const ConstraintRegion> regions,
                                  const ConstraintOptions& options) {
  for (const auto& r : regions) r.Validate(z.bins(), z.frames());
  ConstrainedTrack out;
  out.trace = TrackSingle(z, model);
  auto missed = [&](const Trace& t) {
    std::vector<const ConstraintRegion*> list;
    for (const auto& r : regions) {
      if (!r.PassedBy(t)) list.push_back(&r);
    }
    return list;
  };
  auto pending = missed(out.trace);
  if (pending.empty()) return out;

  Spectrogram scaled = z;
  while (!pending.empty()) {
    if (out.rounds == options.max_rounds) {
      throw ConstraintUnsatisfiedError(out.trace, out.rounds);
    }
    for (const ConstraintRegion* r : pending) {
      for (std::size_t n = r->first_frame; n <= r->last_frame; ++n) {
        const std::size_t i = n - r->first_frame;
        for (std::size_t m = r->bin_lo[i]; m <= r->bin_hi[i]; ++m) {
          scaled(m, n) *= options.scale;
        }
      }
    }
    ++out.rounds;
    out.trace = TrackSingle(scaled, model);
    pending = missed(out.trace);
  }
  return out;
}

}  // namespace amtc
