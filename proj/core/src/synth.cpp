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

#include "amtc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "amtc/error.hpp"

namespace amtc {

namespace {

std::mt19937_64 StreamFor(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x414d5443u};
  return std::mt19937_64(seq);
}

double Reflect(double f, double lo, double hi) {
  if (f < lo) f = 2.0 * lo - f;
  if (f > hi) f = 2.0 * hi - f;
  return std::clamp(f, lo, hi);
}

struct ProcessSampler {
  const SynthConfig& cfg;
  std::size_t count;
  std::mt19937_64& rng;
  const std::vector<std::vector<double>>& earlier;

  std::vector<double> operator()(const RandomWalkProcess& p) const {
    const double lo = cfg.band_min, hi = cfg.band_max;
    double f = p.start;
    if (std::isnan(f)) {
      const double margin = 0.1 * (hi - lo);
      f = std::uniform_real_distribution<double>(lo + margin, hi - margin)(rng);
    }
    std::normal_distribution<double> step(0.0, p.step_std);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
      if (i > 0 && p.step_std > 0.0) f = Reflect(f + step(rng), lo, hi);
      out[i] = f;
    }
    return out;
  }

  std::vector<double> operator()(const ArProcess& p) const {
    const double mean =
        std::isnan(p.mean) ? 0.5 * (cfg.band_min + cfg.band_max) : p.mean;
    std::normal_distribution<double> noise(0.0, p.noise_std);
    std::vector<double> out(count);
    std::vector<double> hist(p.coeffs.size(), 0.0);  // deviations, newest first
    for (std::size_t i = 0; i < count; ++i) {
      double dev = p.noise_std > 0.0 ? noise(rng) : 0.0;
      for (std::size_t j = 0; j < p.coeffs.size(); ++j) dev += p.coeffs[j] * hist[j];
      const double f = std::clamp(mean + dev, cfg.band_min, cfg.band_max);
      if (!hist.empty()) {
        std::rotate(hist.rbegin(), hist.rbegin() + 1, hist.rend());
        hist[0] = f - mean;
      }
      out[i] = f;
    }
    return out;
  }

  std::vector<double> operator()(const ConstantProcess& p) const {
    return std::vector<double>(count, p.freq);
  }

  std::vector<double> operator()(const PiecewiseProcess& p) const {
    if (p.times_s.empty() || p.times_s.size() != p.freqs.size()) {
      throw InputError("bad_config", "piecewise process needs matching knots");
    }
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double t = static_cast<double>(i) / cfg.sample_rate_hz;
      const auto it = std::upper_bound(p.times_s.begin(), p.times_s.end(), t);
      if (it == p.times_s.begin()) {
        out[i] = p.freqs.front();
      } else if (it == p.times_s.end()) {
        out[i] = p.freqs.back();
      } else {
        const std::size_t k = static_cast<std::size_t>(it - p.times_s.begin());
        const double w = (t - p.times_s[k - 1]) / (p.times_s[k] - p.times_s[k - 1]);
        out[i] = (1.0 - w) * p.freqs[k - 1] + w * p.freqs[k];
      }
    }
    return out;
  }

  std::vector<double> operator()(const OffsetProcess& p) const {
    if (p.reference >= earlier.size()) {
      throw InputError("bad_config",
                       "offset process must reference an earlier trace");
    }
    std::vector<double> out = earlier[p.reference];
    for (double& f : out) f += p.offset;
    return out;
  }
};

}  // namespace

SynthResult Synthesize(const SynthConfig& cfg) {
  if (!(cfg.sample_rate_hz > 0.0) || !(cfg.duration_s > 0.0)) {
    throw InputError("bad_config", "duration and sample rate must be positive");
  }
  if (!(cfg.units_per_hz > 0.0) || !(cfg.band_max > cfg.band_min)) {
    throw InputError("bad_config", "invalid synthesis band");
  }
  if (std::isnan(cfg.snr_db) || cfg.snr_db == -std::numeric_limits<double>::infinity()) {
    throw InputError("bad_config", "snr_db must be a number or +inf");
  }
  const auto count =
      static_cast<std::size_t>(std::llround(cfg.duration_s * cfg.sample_rate_hz));
  SynthResult out;
  out.signal.sample_rate_hz = cfg.sample_rate_hz;
  out.signal.samples.assign(count, 0.0);

  double power = 0.0;
  for (std::size_t l = 0; l < cfg.traces.size(); ++l) {
    const TraceSpec& spec = cfg.traces[l];
    auto rng = StreamFor(cfg.seed, l + 1);
    std::vector<double> freq =
        std::visit(ProcessSampler{cfg, count, rng, out.freq}, spec.process);
    std::vector<bool> voiced(count, true);
    double phase = std::uniform_real_distribution<double>(
        0.0, 2.0 * std::numbers::pi)(rng);
    for (std::size_t i = 0; i < count; ++i) {
      phase += 2.0 * std::numbers::pi * (freq[i] / cfg.units_per_hz) /
               cfg.sample_rate_hz;
      const double t = static_cast<double>(i) / cfg.sample_rate_hz;
      if (spec.unvoiced && t >= spec.unvoiced->first && t < spec.unvoiced->second) {
        voiced[i] = false;
        continue;
      }
      out.signal.samples[i] += spec.amplitude * std::sin(phase);
    }
    power += spec.amplitude * spec.amplitude / 2.0;
    out.freq.push_back(std::move(freq));
    out.voiced.push_back(std::move(voiced));
  }

  if (std::isfinite(cfg.snr_db)) {
    const double reference = cfg.traces.empty() ? 0.5 : power;
    out.noise_variance = reference / std::pow(10.0, cfg.snr_db / 10.0);
    auto rng = StreamFor(cfg.seed, 0);
    std::normal_distribution<double> noise(0.0, std::sqrt(out.noise_variance));
    for (double& s : out.signal.samples) s += noise(rng);
  }
  return out;
}

GroundTruth OnFrameGrid(const SynthResult& synth, const StftLayout& layout,
                        std::size_t frames) {
  GroundTruth gt;
  for (std::size_t l = 0; l < synth.freq.size(); ++l) {
    std::vector<double> f(frames);
    std::vector<bool> v(frames);
    for (std::size_t n = 0; n < frames; ++n) {
      const std::size_t centre = n * layout.hop + layout.window / 2;
      const std::size_t i = std::min(centre, synth.freq[l].size() - 1);
      f[n] = synth.freq[l][i];
      v[n] = synth.voiced[l][i];
    }
    gt.freq.push_back(std::move(f));
    gt.voiced.push_back(std::move(v));
  }
  return gt;
}

double MainLobeWidth(double window_len_s, double units_per_hz) {
  return 2.0 / window_len_s * units_per_hz;
}

double TrsOffset(double trs, double window_len_s, double units_per_hz) {
  return trs * MainLobeWidth(window_len_s, units_per_hz);
}

}  // namespace amtc
