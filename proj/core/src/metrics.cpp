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

#include "amtc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "amtc/error.hpp"

namespace amtc {

SingleMetrics ComputeSingleMetrics(std::span<const double> est,
                                   std::span<const double> truth, double tau) {
  if (est.size() != truth.size()) {
    throw InputError("dimension_mismatch",
                     "estimate has " + std::to_string(est.size()) +
                         " frames, ground truth has " +
                         std::to_string(truth.size()));
  }
  SingleMetrics m;
  if (est.empty()) return m;
  double sq = 0.0, rel = 0.0;
  std::size_t over = 0;
  for (std::size_t n = 0; n < est.size(); ++n) {
    if (!(truth[n] > 0.0)) {
      throw InputError("nonpositive_truth", "ground truth must be positive");
    }
    const double d = std::abs(est[n] - truth[n]);
    sq += d * d;
    const double r = d / truth[n];
    rel += r;
    if (r > tau) ++over;
  }
  const auto count = static_cast<double>(est.size());
  m.rmse = std::sqrt(sq / count);
  m.erate = rel / count;
  m.ecount = static_cast<double>(over) / count;
  return m;
}

std::vector<double> TraceFrequencies(const Trace& trace, const AxisMap& axis) {
  std::vector<double> out(trace.size());
  for (std::size_t n = 0; n < trace.size(); ++n) out[n] = axis.at(trace[n]);
  return out;
}

double Pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("dimension_mismatch", "sequences differ in length");
  }
  if (a.size() < 2) throw InputError("too_short", "need at least two samples");
  const auto count = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / count;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / count;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) {
    throw InputError("zero_variance", "correlation undefined for constant input");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double MultiMetrics::error(std::size_t truth_count, std::size_t est_count) const {
  if (truth_count >= confusion.size() || est_count >= confusion.size()) return 0.0;
  return confusion[truth_count][est_count];
}

namespace {

std::size_t CommonFrames(const std::vector<std::vector<double>>& freq,
                         const std::vector<VoicedMask>& voiced,
                         std::size_t frames, bool& set) {
  if (freq.size() != voiced.size()) {
    throw InputError("dimension_mismatch", "one mask per trace required");
  }
  for (std::size_t l = 0; l < freq.size(); ++l) {
    for (std::size_t len : {freq[l].size(), voiced[l].size()}) {
      if (set && len != frames) {
        throw InputError("dimension_mismatch", "traces differ in frame count");
      }
      frames = len;
      set = true;
    }
  }
  return frames;
}

}  // namespace

MultiMetrics ComputeMultiMetrics(
    const std::vector<std::vector<double>>& est_freq,
    const std::vector<VoicedMask>& est_voiced,
    const std::vector<std::vector<double>>& truth_freq,
    const std::vector<VoicedMask>& truth_voiced) {
  bool set = false;
  std::size_t frames = CommonFrames(est_freq, est_voiced, 0, set);
  frames = CommonFrames(truth_freq, truth_voiced, frames, set);

  const std::size_t side = std::max({est_freq.size(), truth_freq.size(),
                                     std::size_t{2}}) + 1;
  std::vector<std::vector<std::size_t>> counts(side,
                                               std::vector<std::size_t>(side, 0));
  std::vector<double> fine_sum(truth_freq.size(), 0.0);
  std::vector<std::size_t> fine_frames(truth_freq.size(), 0);
  std::vector<double> dev(truth_freq.size());
  std::size_t gross = 0;

  for (std::size_t n = 0; n < frames; ++n) {
    std::size_t n_true = 0, n_est = 0;
    for (const auto& v : truth_voiced) n_true += v[n] ? 1 : 0;
    for (const auto& v : est_voiced) n_est += v[n] ? 1 : 0;
    if (n_true != n_est) {
      ++counts[n_true][n_est];
      continue;
    }
    if (n_true == 0) continue;
    bool is_gross = false;
    for (std::size_t l = 0; l < truth_freq.size(); ++l) {
      if (!truth_voiced[l][n]) continue;
      const double f = truth_freq[l][n];
      if (!(f > 0.0)) {
        throw InputError("nonpositive_truth", "ground truth must be positive");
      }
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < est_freq.size(); ++i) {
        if (est_voiced[i][n]) best = std::min(best, std::abs(est_freq[i][n] - f) / f);
      }
      dev[l] = best;
      if (best > kGrossThreshold) is_gross = true;
    }
    if (is_gross) {
      ++gross;
      continue;
    }
    for (std::size_t l = 0; l < truth_freq.size(); ++l) {
      if (!truth_voiced[l][n]) continue;
      fine_sum[l] += dev[l];
      ++fine_frames[l];
    }
  }

  MultiMetrics m;
  const double denom = frames == 0 ? 1.0 : static_cast<double>(frames);
  m.confusion.assign(side, std::vector<double>(side, 0.0));
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      m.confusion[i][j] = static_cast<double>(counts[i][j]) / denom;
      m.total += m.confusion[i][j];
    }
  }
  m.gross = static_cast<double>(gross) / denom;
  m.total += m.gross;
  m.fine_per_trace.resize(truth_freq.size(), 0.0);
  for (std::size_t l = 0; l < truth_freq.size(); ++l) {
    if (fine_frames[l] > 0) {
      m.fine_per_trace[l] = fine_sum[l] / static_cast<double>(fine_frames[l]);
    }
    m.fine += m.fine_per_trace[l];
  }
  return m;
}

double RocAuc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) {
    throw InputError("dimension_mismatch", "one label per score required");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U from average ranks.
  double rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        rank_sum += avg_rank;
        ++pos;
      }
    }
    i = j;
  }
  const std::size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) {
    throw InputError("single_class", "ROC needs positive and negative labels");
  }
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

}  // namespace amtc
