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

#include "amtc/online.hpp"

#include <algorithm>
#include <string>

#include "amtc/carve.hpp"
#include "amtc/error.hpp"

namespace amtc {

OnlineTracker::OnlineTracker(OnlineParams params, std::size_t bins)
    : params_(std::move(params)), bins_(bins) {
  if (bins_ == 0) throw InputError("bad_config", "online tracker needs M >= 1");
  if (params_.num_traces == 0) {
    throw InputError("bad_config", "number of traces must be at least 1");
  }
  if (params_.models.empty() ||
      (params_.models.size() != 1 &&
       params_.models.size() != params_.num_traces)) {
    throw InputError("bad_config", "expected 1 or " +
                                       std::to_string(params_.num_traces) +
                                       " transition models");
  }
  for (const auto& m : params_.models) m.Validate(bins_);

  // One spare column keeps the layer-0 predecessor alive when k1 = k2 = 0.
  const std::size_t ring = params_.capacity() + 1;
  layers_.resize(params_.num_traces);
  for (auto& layer : layers_) {
    layer.z.assign(ring * bins_, 0.0);
    layer.g.assign(ring * bins_, 0.0);
    layer.prev.assign(ring * bins_, 0);
    layer.f.assign(ring, 0);
    layer.rer.assign(ring, 0.0);
  }
}

std::span<double> OnlineTracker::Col(std::vector<double>& v, std::size_t frame) {
  return {v.data() + (frame % (params_.capacity() + 1)) * bins_, bins_};
}

std::span<const double> OnlineTracker::Col(const std::vector<double>& v,
                                           std::size_t frame) const {
  return {v.data() + (frame % (params_.capacity() + 1)) * bins_, bins_};
}

const TransitionModel& OnlineTracker::ModelFor(std::size_t layer) const {
  return params_.models.size() == 1 ? params_.models[0] : params_.models[layer];
}

std::size_t OnlineTracker::buffered_columns() const {
  if (received_ == 0) return 0;
  return received_ - window_start_;
}

void OnlineTracker::Update(std::size_t tau1, std::size_t tau2,
                           std::size_t z_dirty) {
  const std::size_t ring = params_.capacity() + 1;
  auto slot = [ring](std::size_t frame) { return frame % ring; };
  // f values for frames below this bound come from the previous update.
  const std::size_t estimated_end = estimated_end_;

  std::size_t upstream_dirty = z_dirty;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Layer& layer = layers_[l];
    const TransitionModel& model = ModelFor(l);

    // Compensated input of this layer.
    std::size_t zd = upstream_dirty;
    if (l > 0 && zd != kClean) {
      zd = std::max(zd, tau1);
      const Layer& above = layers_[l - 1];
      for (std::size_t j = zd; j <= tau2; ++j) {
        CompensateColumn(Col(above.z, j), above.f[slot(j)], Col(layer.z, j));
        ++stats_.columns_compensated;
      }
    }

    // Accumulated map.
    std::size_t gd = kClean;
    if (l == 0) {
      gd = zd;
    } else if (!layer.seeded || layer.seed != tau1) {
      gd = tau1;
    } else if (zd != kClean) {
      gd = zd;
    }
    if (gd != kClean) {
      for (std::size_t j = gd; j <= tau2; ++j) {
        const std::size_t s = slot(j);
        std::span<double> g_out(layer.g.data() + s * bins_, bins_);
        if (j == (l == 0 ? 0 : tau1)) {
          SeedColumn(Col(layer.z, j), model, g_out);
        } else {
          AdvanceColumn(Col(layer.g, j - 1), Col(layer.z, j), model, g_out,
                        std::span<std::uint32_t>(layer.prev.data() + s * bins_,
                                                 bins_));
        }
        ++stats_.columns_accumulated;
      }
    }
    if (l > 0) {
      layer.seed = tau1;
      layer.seeded = true;
    }

    // Backtrack, stopping where the previous path is provably unchanged.
    std::size_t f_dirty = kClean;
    if (gd != kClean) {
      std::size_t steps = 0;
      std::size_t cur = ArgmaxLowest(Col(layer.g, tau2));
      if (tau2 >= estimated_end || layer.f[slot(tau2)] != cur) f_dirty = tau2;
      layer.f[slot(tau2)] = cur;
      for (std::size_t i = tau2; i > tau1; --i) {
        const std::size_t cand = layer.prev[slot(i) * bins_ + cur];
        ++steps;
        const std::size_t at = i - 1;
        const bool known = at < estimated_end;
        if (known && at < gd && layer.f[slot(at)] == cand) break;
        if (!known || layer.f[slot(at)] != cand) f_dirty = at;
        layer.f[slot(at)] = cand;
        cur = cand;
      }
      if (l == 0) {
        stats_.last_backtrack_steps = steps;
      }
      stats_.backtrack_steps += steps;
    }

    // Per-frame statistic.
    const std::size_t rd = std::min(zd, f_dirty);
    if (rd != kClean) {
      for (std::size_t j = std::max(rd, tau1); j <= tau2; ++j) {
        layer.rer[slot(j)] =
            ColumnRer(Col(layer.z, j), layer.f[slot(j)], params_.det.delta_f);
      }
    }
    upstream_dirty = rd;
  }
  estimated_end_ = tau2 + 1;
  window_start_ = tau1;
}

OnlineEstimate OnlineTracker::Emit(std::size_t frame, std::size_t tau1,
                                   std::size_t tau2) {
  const std::size_t ring = params_.capacity() + 1;
  OnlineEstimate est;
  est.frame = frame;
  std::vector<double> rers(tau2 - tau1 + 1);
  for (const Layer& layer : layers_) {
    for (std::size_t j = tau1; j <= tau2; ++j) rers[j - tau1] = layer.rer[j % ring];
    const VoicedMask mask = MergeSegments(Decide(rers, params_.det.delta_rer),
                                          params_.det.delta1, params_.det.delta2);
    est.bins.push_back(layer.f[frame % ring]);
    est.voiced.push_back(mask[frame - tau1]);
  }
  emitted_ = frame + 1;
  return est;
}

std::optional<OnlineEstimate> OnlineTracker::Push(std::span<const double> frame) {
  if (finalized_) {
    throw InputError("stream_closed", "tracker already finalized");
  }
  if (frame.size() != bins_) {
    throw InputError("dimension_mismatch",
                     "frame has " + std::to_string(frame.size()) +
                         " bins, tracker expects " + std::to_string(bins_));
  }
  for (double v : frame) {
    if (!(v >= 0.0)) {
      throw InputError("negative_magnitude", "frame values must be nonnegative");
    }
  }
  const std::size_t t = received_++;
  auto dst = Col(layers_[0].z, t);
  std::copy(frame.begin(), frame.end(), dst.begin());

  const bool ready = t >= params_.k2;
  const std::size_t n = ready ? t - params_.k2 : 0;
  const std::size_t tau1 = ready && n > params_.k1 ? n - params_.k1 : 0;
  Update(tau1, t, t);
  if (!ready) return std::nullopt;
  return Emit(n, tau1, t);
}

std::vector<OnlineEstimate> OnlineTracker::Finalize() {
  std::vector<OnlineEstimate> out;
  if (finalized_) return out;
  finalized_ = true;
  if (received_ == 0) return out;
  const std::size_t tau2 = received_ - 1;
  for (std::size_t n = emitted_; n <= tau2; ++n) {
    const std::size_t tau1 = n > params_.k1 ? n - params_.k1 : 0;
    Update(tau1, tau2, kClean);
    out.push_back(Emit(n, tau1, tau2));
  }
  return out;
}

}  // namespace amtc
