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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails, except those named with --known-red
// (documented as out of reach; their line still reads FAIL).
// Usage: amtc_acceptance [--known-red N]... [criterion...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "amtc/carve.hpp"
#include "amtc/metrics.hpp"
#include "amtc/online.hpp"
#include "amtc/presence.hpp"
#include "amtc/spectrogram.hpp"
#include "amtc/synth.hpp"
#include "amtc/trace_dp.hpp"
#include "oracles.hpp"

namespace {

using namespace amtc;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::vector<OnlineEstimate> RunOnline(const Spectrogram& z,
                                      const OnlineParams& p) {
  OnlineTracker tracker(p, z.bins());
  std::vector<OnlineEstimate> out;
  for (std::size_t n = 0; n < z.frames(); ++n) {
    if (auto e = tracker.Push(z.column(n))) out.push_back(*e);
  }
  for (auto& e : tracker.Finalize()) out.push_back(std::move(e));
  return out;
}

// Random ridges over a noise floor; the stronger one switches on and off.
Spectrogram RidgeStream(std::mt19937_64& rng, std::size_t bins,
                        std::size_t frames) {
  Spectrogram z = testing::RandomSpectrogram(rng, bins, frames);
  std::uniform_int_distribution<int> step(-1, 1);
  std::bernoulli_distribution flip(0.15);
  long a = static_cast<long>(bins / 4), b = static_cast<long>(3 * bins / 4);
  const long top = static_cast<long>(bins) - 1;
  bool on = true;
  for (std::size_t n = 0; n < frames; ++n) {
    a = std::clamp(a + step(rng), 0L, top);
    b = std::clamp(b + step(rng), 0L, top);
    if (flip(rng)) on = !on;
    if (on) z(static_cast<std::size_t>(a), n) += 4.0;
    z(static_cast<std::size_t>(b), n) += 2.5;
  }
  return z;
}

// Single-trace setting: 30 Hz, 10 s rectangular window, 98% overlap,
// 35x zero padding, 40-240 bpm.
StftConfig SingleStft() {
  StftConfig cfg;
  cfg.window_len_s = 10.0;
  cfg.overlap_fraction = 0.98;
  cfg.zero_pad_factor = 35;
  return cfg;
}

// Multi-trace setting: 1-minute signals at 30 Hz, 1 bpm bins over a
// 168-bin band, slow transitions.
constexpr double kMultiLo = 50.0;
constexpr double kMultiHi = 217.0;

StftConfig MultiStft() {
  StftConfig cfg;
  cfg.window_len_s = 10.0;
  cfg.overlap_fraction = 0.98;
  cfg.zero_pad_factor = 6;
  return cfg;
}

SynthConfig MultiSynth(double snr_db, std::uint64_t seed) {
  SynthConfig c;
  c.duration_s = 60.0;
  c.band_min = kMultiLo;
  c.band_max = kMultiHi;
  c.snr_db = snr_db;
  c.seed = seed;
  c.traces.clear();
  return c;
}

struct Analysed {
  Spectrogram z;
  GroundTruth truth;
};

Analysed Analyse(const SynthConfig& c, const StftConfig& cfg) {
  const SynthResult s = Synthesize(c);
  Analysed a;
  a.z = ComputeSpectrogram(s.signal, cfg, {c.band_min, c.band_max, c.units_per_hz});
  a.truth = OnFrameGrid(s, ResolveLayout(cfg, c.sample_rate_hz), a.z.frames());
  return a;
}

Outcome DpOptimality() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> size_m(1, 6), size_n(1, 5),
      band(0, 2);
  std::size_t bad_obj = 0, bad_bins = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = size_m(rng), n = size_n(rng);
    const Spectrogram z = testing::RandomSpectrogram(rng, m, n);
    const TransitionModel model =
        i < 800 ? TransitionModel::UniformBand(band(rng))
                : testing::RandomExplicitModel(rng, m);
    const Trace got = TrackSingle(z, model);
    const auto want = testing::ExhaustiveTrack(z, model);
    const double obj = testing::PathObjective(z, model, got);
    if (std::abs(obj - want.objective) >
        1e-9 * std::max(1.0, std::abs(want.objective))) {
      ++bad_obj;
    }
    if (got != want.trace) ++bad_bins;
  }
  const double secs = Seconds(start);
  return {bad_obj == 0 && bad_bins == 0 && secs < 10.0,
          Fmt("objective mismatches %zu, bin mismatches %zu, %.2f s", bad_obj,
              bad_bins, secs)};
}

Outcome LambdaScaleInvariance() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> band(0, 4), bins(8, 40),
      frames(5, 60);
  std::size_t bad = 0;
  for (int i = 0; i < 100; ++i) {
    const Spectrogram z = testing::RandomSpectrogram(rng, bins(rng), frames(rng));
    const std::size_t k = band(rng);
    const Trace ref = TrackSingle(z, TransitionModel::UniformBand(k, 1.0));
    bool same = true;
    for (double lambda : {0.0, 1e3}) {
      same &= TrackSingle(z, TransitionModel::UniformBand(k, lambda)) == ref;
    }
    for (double scale : {0.01, 100.0}) {
      Spectrogram scaled = z;
      for (std::size_t n = 0; n < z.frames(); ++n) {
        for (double& v : scaled.column(n)) v *= scale;
      }
      same &= TrackSingle(scaled, TransitionModel::UniformBand(k)) == ref;
    }
    if (!same) ++bad;
  }
  return {bad == 0, Fmt("%zu of 100 instances changed", bad)};
}

Outcome CompensationContract() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> bins(3, 80), frames(1, 50);
  std::size_t violations = 0;
  for (int i = 0; i < 100; ++i) {
    const Spectrogram z = testing::RandomSpectrogram(rng, bins(rng), frames(rng));
    std::uniform_int_distribution<std::size_t> pick(0, z.bins() - 1);
    Trace t;
    for (std::size_t n = 0; n < z.frames(); ++n) t.bins.push_back(pick(rng));
    std::vector<EffectivePeak> peaks;
    const Spectrogram c = Compensate(z, t, &peaks);
    for (std::size_t n = 0; n < z.frames(); ++n) {
      if (c(t[n], n) != 0.0) ++violations;
      if (!(peaks[n].sigma2 >= kSigma2Floor)) ++violations;
      for (std::size_t m = 0; m < z.bins(); ++m) {
        if (!(c(m, n) >= 0.0 && c(m, n) <= z(m, n))) ++violations;
      }
    }
  }
  return {violations == 0, Fmt("%zu violations", violations)};
}

Outcome OnlineEquivalence() {
  std::mt19937_64 rng(4);
  std::size_t full_bad = 0, oracle_bad = 0;
  const std::pair<std::size_t, std::size_t> windows[] = {{0, 0}, {10, 20}, {50, 100}};
  for (int i = 0; i < 50; ++i) {
    const Spectrogram z = RidgeStream(rng, 16, 40);
    OnlineParams p;
    p.models = {TransitionModel::UniformBand(1)};
    p.det = DetectionParams{2.41, 2, 4, 4};
    p.k1 = p.k2 = 39;
    const auto full = RunOnline(z, p);
    const Trace offline = TrackSingle(z, p.models.front());
    for (std::size_t n = 0; n < z.frames(); ++n) {
      if (full.at(n).bins.at(0) != offline[n]) {
        ++full_bad;
        break;
      }
    }
    p.num_traces = 2;
    for (const auto& [k1, k2] : windows) {
      p.k1 = k1;
      p.k2 = k2;
      if (RunOnline(z, p) != testing::BruteForceOnline(z, p)) ++oracle_bad;
    }
  }
  return {full_bad == 0 && oracle_bad == 0,
          Fmt("full-window mismatches %zu/50, windowed re-solve mismatches "
              "%zu/150",
              full_bad, oracle_bad)};
}

// Per-block wall time of processing `frames` frames, in blocks of `block`;
// the minimum over `repeats` runs of each block.
std::vector<double> BlockTimes(std::size_t frames, std::size_t block,
                               int repeats,
                               const std::function<void(std::size_t)>& step,
                               const std::function<void()>& reset) {
  std::vector<double> best(frames / block, std::numeric_limits<double>::infinity());
  for (int r = 0; r < repeats; ++r) {
    reset();
    for (std::size_t b = 0; b < best.size(); ++b) {
      const auto t0 = Clock::now();
      for (std::size_t n = b * block; n < (b + 1) * block; ++n) step(n);
      best[b] = std::min(best[b], Seconds(t0));
    }
  }
  return best;
}

// Least-squares slope of v against its index.
double Slope(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mx = (n - 1) / 2;
  const double my = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    sxy += (static_cast<double>(i) - mx) * (v[i] - my);
    sxx += (static_cast<double>(i) - mx) * (static_cast<double>(i) - mx);
  }
  return sxy / sxx;
}

Outcome OnlineComplexity() {
  std::mt19937_64 rng(5);
  const std::size_t bins = 64;
  const Spectrogram z = RidgeStream(rng, bins, 2000);
  OnlineParams p;
  p.num_traces = 2;
  p.models = {TransitionModel::UniformBand(2)};

  // Work counters: columns accumulated per frame must stay bounded.
  std::optional<OnlineTracker> tracker;
  std::vector<std::uint64_t> cols_per_block;
  std::uint64_t last_cols = 0;
  const std::size_t block = 100;
  auto step = [&](std::size_t n) {
    tracker->Push(z.column(n));
    if ((n + 1) % block == 0) {
      const std::uint64_t c = tracker->stats().columns_accumulated +
                              tracker->stats().columns_compensated;
      cols_per_block.push_back(c - last_cols);
      last_cols = c;
    }
  };
  auto reset = [&] {
    tracker.emplace(p, bins);
    cols_per_block.clear();
    last_cols = 0;
  };
  const auto online = BlockTimes(2000, block, 3, step, reset);
  const std::vector<std::uint64_t> steady(cols_per_block.begin() + 3,
                                          cols_per_block.end());
  const auto [lo, hi] = std::minmax_element(steady.begin(), steady.end());
  const bool work_flat = *hi <= *lo + *lo / 10;

  // Timing: steady-state slope relative to the mean block time.
  const std::vector<double> tail(online.begin() + 3, online.end());
  const double mean_t = std::accumulate(tail.begin(), tail.end(), 0.0) /
                        static_cast<double>(tail.size());
  const double drift = Slope(tail) * static_cast<double>(tail.size()) / mean_t;
  const bool time_flat = std::abs(drift) < 0.5;

  // Brute-force re-solve on 500 frames: per-block time must grow.
  const Spectrogram zb = z.SliceFrames(0, 500);
  std::vector<double> bf_blocks;
  for (std::size_t end = block; end <= 500; end += block) {
    const auto t0 = Clock::now();
    (void)testing::BruteForceOnline(zb.SliceFrames(0, end), p);
    bf_blocks.push_back(Seconds(t0));
  }
  // Cumulative cost of a prefix of length end; difference per block.
  std::vector<double> bf_diff;
  for (std::size_t i = 0; i < bf_blocks.size(); ++i) {
    bf_diff.push_back(bf_blocks[i] - (i ? bf_blocks[i - 1] : 0.0));
  }
  const double growth = bf_diff.back() / bf_diff[1];
  const bool brute_superlinear = growth > 2.0;
  return {work_flat && time_flat && brute_superlinear,
          Fmt("online columns/block %llu..%llu, online time drift %.3f, "
              "brute-force per-block growth x%.2f",
              static_cast<unsigned long long>(*lo),
              static_cast<unsigned long long>(*hi), drift, growth)};
}

Outcome SingleTraceLowSnr() {
  std::vector<double> ecount, erate;
  const StftConfig cfg = SingleStft();
  for (int i = 0; i < 100; ++i) {
    SynthConfig c;
    c.snr_db = -8.0;
    c.seed = 600 + static_cast<std::uint64_t>(i);
    c.traces = {TraceSpec{RandomWalkProcess{std::nan(""), 0.005}, 1.0, {}}};
    const Analysed a = Analyse(c, cfg);
    const Trace t = TrackSingle(a.z, TransitionModel::UniformBand(3));
    const SingleMetrics m = ComputeSingleMetrics(
        TraceFrequencies(t, a.z.freq_axis()), a.truth.freq[0], kDefaultTau);
    ecount.push_back(m.ecount);
    erate.push_back(m.erate);
  }
  const double mc = Median(ecount), mr = Median(erate);
  return {mc <= 0.02 && mr <= 0.02,
          Fmt("median ECount %.4f, median ERate %.4f", mc, mr)};
}

Outcome PresenceDetection() {
  const auto start = Clock::now();
  const StftConfig cfg = SingleStft();
  std::string detail;
  bool pass = true;
  for (double snr : {-4.0, -6.0, -8.0, -10.0, -12.0}) {
    std::mt19937_64 rng(700 + static_cast<std::uint64_t>(-snr));
    std::vector<double> scores;
    std::vector<bool> labels;
    double frac = 0.0;
    for (int i = 0; i < 100; ++i) {
      // Paired lengths f and 1 - f balance voiced and unvoiced frames.
      frac = i % 2 == 0 ? std::uniform_real_distribution<>(0.25, 0.75)(rng)
                        : 1.0 - frac;
      SynthConfig c;
      c.snr_db = snr;
      c.seed = 7000 + static_cast<std::uint64_t>(i) +
               1000 * static_cast<std::uint64_t>(-snr);
      const double len = frac * c.duration_s;
      const double begin =
          std::uniform_real_distribution<>(0.0, c.duration_s - len)(rng);
      c.traces[0].unvoiced = std::make_pair(begin, begin + len);
      const Analysed a = Analyse(c, cfg);
      const Trace t = TrackSingle(a.z, TransitionModel::UniformBand(3));
      const std::vector<double> rer = Rer(a.z, t, DetectionParams{}.delta_f);
      scores.insert(scores.end(), rer.begin(), rer.end());
      labels.insert(labels.end(), a.truth.voiced[0].begin(),
                    a.truth.voiced[0].end());
    }
    const double auc = RocAuc(scores, labels);
    pass &= auc >= 0.9;
    const double voiced =
        static_cast<double>(std::count(labels.begin(), labels.end(), true)) /
        static_cast<double>(labels.size());
    detail += Fmt("%g dB AUC %.4f (voiced %.2f); ", snr, auc, voiced);
  }
  const double secs = Seconds(start);
  pass &= secs < 300.0;
  return {pass, detail + Fmt("%.1f s", secs)};
}

// Mean over frames of the smallest relative deviation of any estimate
// from reference trace l.
double NearestErate(const std::vector<std::vector<double>>& est,
                    const std::vector<double>& ref) {
  double sum = 0.0;
  for (std::size_t n = 0; n < ref.size(); ++n) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : est) best = std::min(best, std::abs(e[n] - ref[n]) / ref[n]);
    sum += best;
  }
  return sum / static_cast<double>(ref.size());
}

Outcome MultiTraceSeparation() {
  const StftConfig cfg = MultiStft();
  bool pass = true;
  std::string detail;
  for (double trs : {0.4, 0.6, 0.8, 1.0}) {
    const double offset = TrsOffset(trs, cfg.window_len_s, 60.0);
    std::mt19937_64 rng(800 + static_cast<std::uint64_t>(trs * 10));
    const double width = kMultiHi - kMultiLo;
    std::uniform_real_distribution<> start(kMultiLo + 0.1 * width,
                                           kMultiHi - 0.1 * width - offset);
    double sum[2] = {0.0, 0.0};
    for (int i = 0; i < 50; ++i) {
      SynthConfig c = MultiSynth(-8.0, 8000 + static_cast<std::uint64_t>(i) +
                                           static_cast<std::uint64_t>(trs * 1000));
      c.traces = {TraceSpec{RandomWalkProcess{start(rng), 0.005}, 1.0, {}},
                  TraceSpec{OffsetProcess{0, offset}, 1.0, {}}};
      const Analysed a = Analyse(c, cfg);
      const MultiTraceResult r =
          AmtcOffline(a.z, 2, TransitionModel::UniformBand(2), DetectionParams{});
      std::vector<std::vector<double>> est;
      for (const Trace& t : r.traces) est.push_back(TraceFrequencies(t, a.z.freq_axis()));
      for (int l = 0; l < 2; ++l) sum[l] += NearestErate(est, a.truth.freq[l]);
    }
    const double e0 = sum[0] / 50, e1 = sum[1] / 50;
    pass &= e0 <= 0.03 && e1 <= 0.03;
    detail += Fmt("TRS %.1f ERate %.4f/%.4f; ", trs, e0, e1);
  }
  return {pass, detail};
}

Outcome TraceCountEstimation() {
  const StftConfig cfg = MultiStft();
  const double lobe = MainLobeWidth(cfg.window_len_s, 60.0);
  const double width = kMultiHi - kMultiLo;
  std::mt19937_64 rng(900);
  std::uniform_real_distribution<> start(kMultiLo + 0.1 * width,
                                         kMultiHi - 0.1 * width);
  std::uniform_real_distribution<> gap_start(20.0, 30.0);
  std::size_t hits = 0;
  std::vector<std::vector<std::size_t>> confusion(4, std::vector<std::size_t>(5, 0));
  for (int i = 0; i < 200; ++i) {
    const std::size_t count = static_cast<std::size_t>(i % 4);
    SynthConfig c = MultiSynth(-8.0, 9000 + static_cast<std::uint64_t>(i));
    // Starting frequencies at least one main lobe apart, and a 20 s
    // unvoiced segment per trace starting in [20, 30] s.
    std::vector<double> starts;
    while (starts.size() < count) {
      const double f = start(rng);
      if (std::all_of(starts.begin(), starts.end(),
                      [&](double g) { return std::abs(f - g) >= lobe; })) {
        starts.push_back(f);
      }
    }
    for (double f : starts) {
      const double g = gap_start(rng);
      c.traces.push_back(TraceSpec{RandomWalkProcess{f, 0.005}, 1.0,
                                   std::make_pair(g, g + 20.0)});
    }
    const Analysed a = Analyse(c, cfg);
    const std::size_t est = EstimateTraceCount(
        a.z, 4, DetectionParams{}.delta_rer, TransitionModel::UniformBand(2),
        DetectionParams{});
    ++confusion[count][est];
    if (est == count) ++hits;
  }
  const double acc = static_cast<double>(hits) / 200.0;
  std::string rows;
  for (std::size_t k = 0; k < 4; ++k) {
    rows += Fmt(" %zu:[%zu %zu %zu %zu %zu]", k, confusion[k][0], confusion[k][1],
                confusion[k][2], confusion[k][3], confusion[k][4]);
  }
  return {acc >= 0.95, Fmt("accuracy %.3f, confusion", acc) + rows};
}

Outcome MetricIdentities() {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<std::size_t> frames(1, 60), traces(0, 3);
  std::uniform_real_distribution<> freq(40.0, 240.0), jitter(-30.0, 30.0);
  std::bernoulli_distribution voiced(0.7), exact(0.3);
  std::size_t bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = frames(rng), lt = traces(rng), le = traces(rng);
    std::vector<std::vector<double>> tf(lt), ef(le);
    std::vector<VoicedMask> tv(lt), ev(le);
    for (std::size_t l = 0; l < lt; ++l) {
      for (std::size_t k = 0; k < n; ++k) {
        tf[l].push_back(freq(rng));
        tv[l].push_back(voiced(rng));
      }
    }
    for (std::size_t l = 0; l < le; ++l) {
      for (std::size_t k = 0; k < n; ++k) {
        const double base = l < lt ? tf[l][k] : freq(rng);
        ef[l].push_back(exact(rng) ? base : std::max(1.0, base + jitter(rng)));
        ev[l].push_back(voiced(rng));
      }
    }

    // Decomposition: total equals the independently counted mismatch and
    // gross frames.
    const MultiMetrics m = ComputeMultiMetrics(ef, ev, tf, tv);
    std::size_t counted = 0;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t nt = 0, ne = 0;
      for (const auto& v : tv) nt += v[k];
      for (const auto& v : ev) ne += v[k];
      if (nt != ne) {
        ++counted;
        continue;
      }
      for (std::size_t l = 0; l < lt; ++l) {
        if (!tv[l][k]) continue;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < le; ++j) {
          if (ev[j][k]) best = std::min(best, std::abs(ef[j][k] - tf[l][k]) / tf[l][k]);
        }
        if (best > kGrossThreshold) {
          ++counted;
          break;
        }
      }
    }
    double parts = m.gross;
    for (const auto& row : m.confusion) {
      for (double v : row) parts += v;
    }
    if (std::abs(m.total - static_cast<double>(counted) / static_cast<double>(n)) > 1e-12 ||
        std::abs(m.total - parts) > 1e-12) {
      ++bad;
    }

    // ECount is non-increasing in tau.
    std::vector<double> est(n), ref(n);
    for (std::size_t k = 0; k < n; ++k) {
      ref[k] = freq(rng);
      est[k] = exact(rng) ? ref[k] : std::max(1.0, ref[k] + jitter(rng));
    }
    double prev = 1.0;
    for (double tau : {0.0, 0.01, 0.03, 0.05, 0.1, 0.2, 0.5, 1.0}) {
      const double e = ComputeSingleMetrics(est, ref, tau).ecount;
      if (e > prev) ++bad;
      prev = e;
    }

    // Identical estimate and truth give zero error everywhere.
    const SingleMetrics z = ComputeSingleMetrics(ref, ref, 0.0);
    if (z.rmse != 0.0 || z.erate != 0.0 || z.ecount != 0.0) ++bad;
    const MultiMetrics zm = ComputeMultiMetrics(tf, tv, tf, tv);
    bool zero = zm.total == 0.0 && zm.gross == 0.0 && zm.fine == 0.0;
    for (double v : zm.fine_per_trace) zero &= v == 0.0;
    if (!zero) ++bad;
  }
  return {bad == 0, Fmt("%zu violations over 1000 inputs", bad)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"dp-optimality", DpOptimality},
      {"lambda-scale-invariance", LambdaScaleInvariance},
      {"compensation-contract", CompensationContract},
      {"online-equivalence", OnlineEquivalence},
      {"online-complexity", OnlineComplexity},
      {"single-trace-low-snr", SingleTraceLowSnr},
      {"presence-detection", PresenceDetection},
      {"multi-trace-separation", MultiTraceSeparation},
      {"trace-count-estimation", TraceCountEstimation},
      {"metric-identities", MetricIdentities},
  };
  std::set<int> only, known_red;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--known-red" && i + 1 < argc) {
      known_red.insert(std::atoi(argv[++i]));
    } else {
      only.insert(std::atoi(argv[i]));
    }
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool excused = known_red.count(id) > 0;
    if (!o.pass && !excused) ++failures;
    std::printf("%s %2d %s: %s%s\n", o.pass ? "PASS" : "FAIL", id,
                criteria[i].first, o.detail.c_str(),
                excused ? (o.pass ? " [listed as known red, now passing]" : " [known red]")
                        : "");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
