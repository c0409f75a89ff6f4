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

#include "tool.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "amtc/error.hpp"
#include "amtc/metrics.hpp"
#include "amtc/online.hpp"
#include "amtc/synth.hpp"
#include "service.hpp"

namespace amtc::tool {

namespace {

using Json = nlohmann::ordered_json;

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string_view FirstLine(std::string_view bytes) {
  while (!bytes.empty()) {
    const auto end = bytes.find('\n');
    const std::string_view line = Trim(bytes.substr(0, end));
    if (!line.empty()) return line;
    if (end == std::string_view::npos) break;
    bytes.remove_prefix(end + 1);
  }
  return {};
}

std::string ReadFile(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw InputError("not_found", "input not found: " + path.string());
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("unreadable", "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("unwritable", "cannot write " + path.string());
  return f;
}

// Flag values that override the config file when given.
struct Overrides {
  std::optional<std::size_t> band;
  std::optional<double> lambda;
  std::optional<double> delta_rer;
  std::optional<std::size_t> delta_f;
  std::optional<std::size_t> delta1;
  std::optional<std::size_t> delta2;
  std::optional<std::size_t> num_traces;
  std::optional<std::size_t> k1;
  std::optional<std::size_t> k2;
  std::optional<double> tau;
  std::optional<std::uint64_t> seed;
  std::optional<double> snr_db;

  void AddModelFlags(CLI::App* app) {
    app->add_option("--band", band, "Largest bin step between frames (k)");
    app->add_option("--lambda", lambda, "Weight of the log prior and transitions");
    app->add_option("--delta-rer", delta_rer, "RER voicing threshold");
    app->add_option("--delta-f", delta_f, "Bins excluded around the peak in RER");
    app->add_option("--delta1", delta1, "Longest unvoiced gap bridged (frames)");
    app->add_option("--delta2", delta2, "Shortest voiced run kept (frames)");
    app->add_option("-L,--traces", num_traces, "Number of traces to extract");
  }

  void Apply(RunConfig& c) const {
    if (band) c.band = *band;
    if (lambda) c.lambda = *lambda;
    if (delta_rer) c.detection.delta_rer = *delta_rer;
    if (delta_f) c.detection.delta_f = *delta_f;
    if (delta1) c.detection.delta1 = *delta1;
    if (delta2) c.detection.delta2 = *delta2;
    if (num_traces) c.num_traces = *num_traces;
    if (k1) c.k1 = *k1;
    if (k2) c.k2 = *k2;
    if (tau) c.tau = *tau;
    if (seed) c.synth.seed = *seed;
    if (snr_db) c.synth.snr_db = *snr_db;
  }
};

RunConfig LoadConfig(const std::string& path, const Overrides& o) {
  RunConfig cfg = path.empty() ? RunConfig{} : LoadRunConfig(path);
  o.Apply(cfg);
  ValidateRunConfig(cfg);
  return cfg;
}

// Reads a streamed spectrogram CSV: the six-value header, then one frame
// per row, handed to `on_frame` as soon as the row arrives. A frame count of
// 0 in the header means "unknown".
void StreamSpectrogramCsv(std::istream& in,
                          const std::function<void(const AxisMap&, std::size_t)>& on_header,
                          const std::function<void(std::span<const double>)>& on_frame) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&] {
    while (std::getline(in, line)) {
      ++line_no;
      if (!Trim(line).empty()) return true;
    }
    return false;
  };
  if (!next()) throw InputError("empty_input", "empty input");
  if (Trim(line) == "M,N,f0,df,t0,dt" && !next()) {
    throw InputError("malformed_header", "missing spectrogram header values");
  }
  auto parse_row = [&](std::vector<double>& out) {
    out.clear();
    std::string_view rest = Trim(line);
    while (true) {
      const auto comma = rest.find(',');
      const std::string field(Trim(rest.substr(0, comma)));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (field.empty() || used != field.size()) {
        throw InputError("malformed_row", "line " + std::to_string(line_no) +
                                              ": not a number");
      }
      out.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  };
  std::vector<double> row;
  parse_row(row);
  if (row.size() != 6 || !(row[0] >= 1) || row[0] != std::floor(row[0]) ||
      !(row[1] >= 0) || row[1] != std::floor(row[1]) || !(row[3] > 0.0)) {
    throw InputError("malformed_header", "header must be M,N,f0,df,t0,dt");
  }
  const auto bins = static_cast<std::size_t>(row[0]);
  const auto frames = static_cast<std::size_t>(row[1]);
  on_header(AxisMap{row[2], row[3]}, bins);
  std::size_t seen = 0;
  while (next()) {
    parse_row(row);
    if (row.size() != bins) {
      throw InputError("malformed_row", "line " + std::to_string(line_no) +
                                            ": expected " + std::to_string(bins) +
                                            " values");
    }
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0) {
        throw InputError("negative_magnitude",
                         "line " + std::to_string(line_no) +
                             ": magnitudes must be finite and nonnegative");
      }
    }
    on_frame(row);
    ++seen;
  }
  if (frames != 0 && seen != frames) {
    throw InputError("malformed_header", "header announces " +
                                             std::to_string(frames) +
                                             " frames, got " + std::to_string(seen));
  }
}

int CmdTrack(const std::string& input, const std::string& config,
             const Overrides& o, const std::string& constraints_path,
             const std::string& kind, double rate, const std::string& out_prefix,
             bool estimate_count, std::ostream& out) {
  const RunConfig cfg = LoadConfig(config, o);
  std::vector<IterationConstraint> constraints;
  if (!constraints_path.empty()) constraints = ParseConstraints(ReadFile(constraints_path));
  const Spectrogram z = SpectrogramFromFile(input, ParsePayloadKind(kind), cfg, rate);
  const MultiTraceResult r = Track(z, cfg, cfg.num_traces, constraints, estimate_count);
  if (!out_prefix.empty()) {
    for (std::size_t l = 0; l < r.count(); ++l) {
      auto f = OpenOut(out_prefix + ".l" + std::to_string(l) + ".csv");
      WriteTraceCsv(f, r.traces[l], r.masks[l], r.freq_axis);
    }
  }
  out << ResultToJson(r) << '\n';
  return kExitOk;
}

int CmdTrackOnline(const std::string& input, const std::string& config,
                   const Overrides& o, const std::string& kind, double rate,
                   std::istream& in, std::ostream& out) {
  const RunConfig cfg = LoadConfig(config, o);
  std::unique_ptr<OnlineTracker> tracker;
  AxisMap axis;
  auto emit = [&](const OnlineEstimate& e) {
    out << EstimateToJson(e, axis) << '\n';
    out.flush();
  };
  auto on_header = [&](const AxisMap& a, std::size_t bins) {
    axis = a;
    tracker = std::make_unique<OnlineTracker>(cfg.Online(), bins);
  };
  auto on_frame = [&](std::span<const double> frame) {
    if (auto e = tracker->Push(frame)) emit(*e);
  };
  if (input == "-") {
    StreamSpectrogramCsv(in, on_header, on_frame);
  } else {
    const Spectrogram z = SpectrogramFromFile(input, ParsePayloadKind(kind), cfg, rate);
    on_header(z.freq_axis(), z.bins());
    for (std::size_t n = 0; n < z.frames(); ++n) on_frame(z.column(n));
  }
  for (const auto& e : tracker->Finalize()) emit(e);
  return kExitOk;
}

void WriteSignal(const std::filesystem::path& path, const TimeSeries& ts,
                 const std::string& format) {
  if (format == "wav") {
    double peak = 0.0;
    for (double s : ts.samples) peak = std::max(peak, std::abs(s));
    SaveWav(path, ts, peak > 0.0 ? peak : 1.0);
    return;
  }
  auto f = OpenOut(path);
  f << "time_s,value\n";
  for (std::size_t i = 0; i < ts.samples.size(); ++i) {
    f << FormatDouble(static_cast<double>(i) / ts.sample_rate_hz) << ','
      << FormatDouble(ts.samples[i]) << '\n';
  }
}

Json SynthOne(const RunConfig& cfg, std::uint64_t seed, const std::string& stem,
              const std::string& format) {
  SynthConfig sc = cfg.synth;
  sc.seed = seed;
  const SynthResult s = Synthesize(sc);
  const StftLayout layout = ResolveLayout(cfg.stft, sc.sample_rate_hz);
  const std::size_t frames = layout.FrameCount(s.signal.samples.size());
  const GroundTruth gt = OnFrameGrid(s, layout, frames);
  const std::string signal_path = stem + "." + format;
  const std::string truth_path = stem + ".truth.csv";
  WriteSignal(signal_path, s.signal, format);
  auto f = OpenOut(truth_path);
  const double hop_s = static_cast<double>(layout.hop) / sc.sample_rate_hz;
  const double center_s = static_cast<double>(layout.window) / 2.0 / sc.sample_rate_hz;
  WriteGroundTruthCsv(f, gt, AxisMap{center_s, hop_s});
  return Json{{"seed", seed},
              {"signal", signal_path},
              {"truth", truth_path},
              {"samples", s.signal.samples.size()},
              {"frames", frames},
              {"noise_variance", s.noise_variance}};
}

int CmdSynth(const std::string& config, const Overrides& o,
             const std::string& out_prefix, const std::string& format,
             std::size_t trials, std::ostream& out) {
  if (format != "wav" && format != "csv") {
    throw InputError("bad_config", "format must be wav or csv");
  }
  if (trials == 0) throw InputError("bad_config", "trials must be >= 1");
  const RunConfig cfg = LoadConfig(config, o);
  if (trials == 1) {
    out << SynthOne(cfg, cfg.synth.seed, out_prefix, format).dump() << '\n';
    return kExitOk;
  }
  for (std::size_t i = 0; i < trials; ++i) {
    out << SynthOne(cfg, cfg.synth.seed + i, out_prefix + "." + std::to_string(i),
                    format)
               .dump()
        << '\n';
  }
  return kExitOk;
}

MetricReport Evaluate(const std::vector<TraceTable>& est, const GroundTruth& gt,
                      double tau) {
  if (est.empty() || gt.freq.empty()) {
    throw InputError("dimension_mismatch", "need at least one estimate and one truth trace");
  }
  MetricReport report;
  report.tau = tau;
  report.single = ComputeSingleMetrics(est[0].freq, gt.freq[0], tau);
  try {
    report.pearson = Pearson(est[0].freq, gt.freq[0]);
  } catch (const InputError&) {
    report.pearson.reset();
  }
  if (est.size() > 1 || gt.freq.size() > 1) {
    std::vector<std::vector<double>> ef;
    std::vector<VoicedMask> ev;
    for (const auto& t : est) {
      ef.push_back(t.freq);
      ev.push_back(t.voiced);
    }
    report.multi = ComputeMultiMetrics(ef, ev, gt.freq, gt.voiced);
  }
  return report;
}

int CmdEval(const std::vector<std::string>& est_paths, const std::string& gt_path,
            double tau, std::ostream& out) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InputError("bad_config", "tau must be >= 0");
  std::vector<TraceTable> est;
  for (const auto& p : est_paths) est.push_back(LoadTraceCsv(p));
  const GroundTruth gt = LoadGroundTruthCsv(gt_path);
  out << MetricReportToJson(Evaluate(est, gt, tau)) << '\n';
  return kExitOk;
}

std::string CsvNumber(double v) {
  return std::isfinite(v) ? FormatDouble(v) : std::string();
}

// One row per trial: synthesize, analyse, track, score.
int CmdBench(const std::string& config, const Overrides& o,
             const std::vector<double>& snrs, std::size_t trials,
             std::size_t threads, std::ostream& out) {
  if (trials == 0) throw InputError("bad_config", "trials must be >= 1");
  const RunConfig cfg = LoadConfig(config, o);
  const std::vector<double> levels = snrs.empty() ? std::vector<double>{cfg.synth.snr_db} : snrs;
  const std::size_t total = levels.size() * trials;
  std::vector<std::string> rows(total);
  std::vector<std::string> errors(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        SynthConfig sc = cfg.synth;
        sc.snr_db = levels[i / trials];
        sc.seed = cfg.synth.seed + i % trials;
        const SynthResult s = Synthesize(sc);
        const Spectrogram z = ComputeSpectrogram(
            s.signal, cfg.stft, {sc.band_min, sc.band_max, sc.units_per_hz});
        const GroundTruth gt =
            OnFrameGrid(s, ResolveLayout(cfg.stft, sc.sample_rate_hz), z.frames());
        const std::size_t traces = std::max<std::size_t>(1, gt.freq.size());
        const MultiTraceResult r = Track(z, cfg, traces);
        std::vector<TraceTable> est;
        for (std::size_t l = 0; l < r.count(); ++l) {
          est.push_back({r.traces[l].bins, TraceFrequencies(r.traces[l], r.freq_axis),
                         r.masks[l]});
        }
        const MetricReport m = Evaluate(est, gt, cfg.tau);
        std::ostringstream row;
        row << sc.seed << ',' << FormatDouble(sc.snr_db) << ',' << cfg.band << ','
            << FormatDouble(cfg.lambda) << ',' << traces << ','
            << FormatDouble(m.single.rmse) << ',' << FormatDouble(m.single.erate)
            << ',' << FormatDouble(m.single.ecount) << ','
            << (m.pearson ? FormatDouble(*m.pearson) : std::string()) << ','
            << (m.multi ? CsvNumber(m.multi->total) : std::string()) << ','
            << (m.multi ? CsvNumber(m.multi->fine) : std::string());
        rows[i] = row.str();
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n = std::max<std::size_t>(1, threads);
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < total; ++i) {
    if (!errors[i].empty()) throw ComputationError("trial_failed", errors[i]);
  }
  out << "seed,snr_db,band,lambda,traces,rmse,erate,ecount,pearson,e_total,e_fine\n";
  for (const auto& r : rows) out << r << '\n';
  return kExitOk;
}

}  // namespace

int ReportError(std::ostream& err) {
  try {
    throw;
  } catch (const Error& e) {
    err << ErrorToJson(e.code(), e.what()) << '\n';
    return e.kind() == ErrorKind::kInput ? kExitInput : kExitComputation;
  } catch (const std::bad_alloc&) {
    err << ErrorToJson("out_of_memory", "out of memory") << '\n';
    return kExitComputation;
  } catch (const std::exception& e) {
    err << ErrorToJson("internal", e.what()) << '\n';
    return kExitComputation;
  }
}

PayloadKind ParsePayloadKind(std::string_view name) {
  if (name.empty() || name == "auto") return PayloadKind::kAuto;
  if (name == "audio") return PayloadKind::kAudio;
  if (name == "spectrogram") return PayloadKind::kSpectrogram;
  throw InputError("bad_config", "kind must be auto, audio or spectrogram");
}

Spectrogram SpectrogramFromBytes(std::string_view bytes, PayloadKind kind,
                                 const RunConfig& cfg, double csv_rate_hz) {
  if (bytes.empty()) throw InputError("empty_input", "empty input");
  const bool wav = bytes.substr(0, 4) == "RIFF";
  if (kind == PayloadKind::kAuto) {
    const std::string_view first = FirstLine(bytes);
    const bool six_fields =
        first == "M,N,f0,df,t0,dt" || std::count(first.begin(), first.end(), ',') == 5;
    kind = !wav && six_fields ? PayloadKind::kSpectrogram : PayloadKind::kAudio;
  }
  if (kind == PayloadKind::kSpectrogram) {
    std::istringstream in{std::string(bytes)};
    return ReadSpectrogramCsv(in);
  }
  TimeSeries ts;
  if (wav) {
    ts = ParseWav(std::span(reinterpret_cast<const unsigned char*>(bytes.data()),
                            bytes.size()));
  } else {
    std::istringstream in{std::string(bytes)};
    ts = ParseTimeSeriesCsv(in, csv_rate_hz);
  }
  return ComputeSpectrogram(ts, cfg.stft, cfg.range);
}

Spectrogram SpectrogramFromFile(const std::filesystem::path& path,
                                PayloadKind kind, const RunConfig& cfg,
                                double csv_rate_hz) {
  return SpectrogramFromBytes(ReadFile(path), kind, cfg, csv_rate_hz);
}

MultiTraceResult Track(const Spectrogram& z, const RunConfig& cfg,
                       std::size_t num_traces,
                       std::span<const IterationConstraint> constraints,
                       bool estimate_count) {
  const TransitionModel model = cfg.Model();
  if (estimate_count) {
    num_traces = EstimateTraceCount(z, cfg.max_traces, cfg.detection.delta_rer,
                                    model, cfg.detection);
    if (num_traces == 0) {
      MultiTraceResult none;
      none.freq_axis = z.freq_axis();
      return none;
    }
  }
  return AmtcOffline(z, num_traces, std::span<const TransitionModel>(&model, 1),
                     cfg.detection, constraints, cfg.constraints);
}

int Run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Adaptive multi-trace carving frequency tracker"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "amtc 0.1.0");

  Overrides o;
  std::string config, input, kind = "auto", out_prefix, constraints, gt, format = "wav";
  std::string host = "127.0.0.1", static_dir;
  double rate = 0.0;
  bool estimate_count = false;
  std::size_t trials = 1, threads = std::max(1u, std::thread::hardware_concurrency());
  int port = 8080;
  std::size_t max_jobs = 32, max_payload = std::size_t{64} << 20;
  std::vector<std::string> est;
  std::vector<double> snrs;
  double tau = kDefaultTau;

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "Run configuration JSON");
    cmd->add_option("--kind", kind, "Input kind: auto, audio or spectrogram")
        ->check(CLI::IsMember({"auto", "audio", "spectrogram"}));
    cmd->add_option("--rate", rate, "Sample rate of a one-column audio CSV (Hz)");
  };

  CLI::App* track = app.add_subcommand("track", "Offline multi-trace tracking");
  track->add_option("input", input, "Audio (WAV/CSV) or spectrogram CSV")->required();
  add_input(track);
  o.AddModelFlags(track);
  track->add_option("--constraints", constraints, "Constraint list JSON");
  track->add_option("--out", out_prefix, "Write PREFIX.l<n>.csv per trace");
  track->add_flag("--estimate-count", estimate_count,
                  "Estimate the number of traces from mean RER");

  CLI::App* online = app.add_subcommand("track-online", "Streaming tracking, NDJSON out");
  online->add_option("input", input, "Input file, or - for a spectrogram CSV on stdin")
      ->required();
  add_input(online);
  o.AddModelFlags(online);
  online->add_option("--k1", o.k1, "Look-back (frames)");
  online->add_option("--k2", o.k2, "Look-ahead, i.e. output delay (frames)");

  CLI::App* synth = app.add_subcommand("synth", "Synthesize signals and ground truth");
  synth->add_option("--config", config, "Run configuration JSON");
  synth->add_option("--out", out_prefix, "Output prefix")->required();
  synth->add_option("--format", format, "Signal format: wav or csv")
      ->check(CLI::IsMember({"wav", "csv"}));
  synth->add_option("--trials", trials, "Number of seeds (seed, seed+1, ...)");
  synth->add_option("--seed", o.seed, "Random seed");
  synth->add_option("--snr", o.snr_db, "SNR in dB");

  CLI::App* eval = app.add_subcommand("eval", "Score estimates against ground truth");
  eval->add_option("--est", est, "Trace CSV (repeat for several traces)")->required();
  eval->add_option("--gt", gt, "Ground-truth CSV")->required();
  eval->add_option("--tau", tau, "Relative deviation threshold of ECount");

  CLI::App* bench = app.add_subcommand("bench", "Batch trials, one CSV row each");
  bench->add_option("--config", config, "Run configuration JSON");
  o.AddModelFlags(bench);
  bench->add_option("--trials", trials, "Trials per SNR level");
  bench->add_option("--snr", snrs, "SNR levels in dB")->delimiter(',');
  bench->add_option("--seed", o.seed, "First seed");
  bench->add_option("--threads", threads, "Worker threads");

  CLI::App* serve = app.add_subcommand("serve", "HTTP service for the interactive UI");
  serve->add_option("--config", config, "Default run configuration JSON");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)");
  serve->add_option("--static", static_dir, "Directory served at /");
  serve->add_option("--max-jobs", max_jobs, "Jobs kept in memory");
  serve->add_option("--max-payload", max_payload, "Upload size cap (bytes)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << ErrorToJson("usage", e.what()) << '\n';
    return kExitInput;
  }

  try {
    if (track->parsed()) {
      return CmdTrack(input, config, o, constraints, kind, rate, out_prefix,
                      estimate_count, out);
    }
    if (online->parsed()) return CmdTrackOnline(input, config, o, kind, rate, in, out);
    if (synth->parsed()) return CmdSynth(config, o, out_prefix, format, trials, out);
    if (eval->parsed()) return CmdEval(est, gt, tau, out);
    if (bench->parsed()) return CmdBench(config, o, snrs, trials, threads, out);
    if (serve->parsed()) {
      ServiceOptions opts;
      opts.defaults = LoadConfig(config, o);
      opts.max_jobs = max_jobs;
      opts.max_payload = max_payload;
      opts.static_dir = static_dir;
      Service service(opts);
      const int bound = service.Bind(host, port);
      if (bound < 0) {
        throw InputError("bind_failed", "cannot listen on " + host + ":" + std::to_string(port));
      }
      err << "listening on http://" << host << ':' << bound << '\n';
      service.Serve();
      return kExitOk;
    }
  } catch (...) {
    return ReportError(err);
  }
  return kExitInput;
}

}  // namespace amtc::tool
