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

#include "amtc/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "amtc/error.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace amtc {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void Bad(const std::string& where, const std::string& what) {
  throw InputError("bad_config", where + ": " + what);
}

// Reads the fields of one JSON object and rejects any it did not consume.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) Bad(path_, "expected an object");
  }

  const Json* Find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void Get(const std::string& key, double& out) {
    if (const Json* v = Find(key)) out = AsDouble(*v, Where(key));
  }

  void Get(const std::string& key, std::size_t& out) {
    if (const Json* v = Find(key)) out = AsSize(*v, Where(key));
  }

  void Get(const std::string& key, unsigned& out) {
    if (const Json* v = Find(key)) {
      const std::size_t n = AsSize(*v, Where(key));
      if (n > 0xffffffffu) Bad(Where(key), "out of range");
      out = static_cast<unsigned>(n);
    }
  }

  void GetU64(const std::string& key, std::uint64_t& out) {
    if (const Json* v = Find(key)) {
      if (!v->is_number_unsigned()) Bad(Where(key), "expected an unsigned integer");
      out = v->get<std::uint64_t>();
    }
  }

  // null reads as NaN.
  void GetOptional(const std::string& key, double& out) {
    if (const Json* v = Find(key)) {
      out = v->is_null() ? std::numeric_limits<double>::quiet_NaN()
                         : AsDouble(*v, Where(key));
    }
  }

  void Get(const std::string& key, std::vector<double>& out) {
    if (const Json* v = Find(key)) {
      if (!v->is_array()) Bad(Where(key), "expected an array");
      out.clear();
      for (const Json& e : *v) out.push_back(AsDouble(e, Where(key)));
    }
  }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) Bad(path_, "unknown key \"" + key + "\"");
    }
  }

  std::string Where(const std::string& key) const { return path_ + "." + key; }

  static double AsDouble(const Json& v, const std::string& where) {
    if (!v.is_number()) Bad(where, "expected a number");
    return v.get<double>();
  }

  static std::size_t AsSize(const Json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) {
      return static_cast<std::size_t>(v.get<long long>());
    }
    Bad(where, "expected a nonnegative integer");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Json Parse(std::string_view text, const char* what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    Bad(what, std::string("malformed JSON (") + e.what() + ")");
  }
}

Json NumberOrNull(double v) {
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json ProcessToJson(const FrequencyProcess& p) {
  Json j;
  if (const auto* rw = std::get_if<RandomWalkProcess>(&p)) {
    j["type"] = "random_walk";
    j["start"] = NumberOrNull(rw->start);
    j["step_std"] = rw->step_std;
  } else if (const auto* ar = std::get_if<ArProcess>(&p)) {
    j["type"] = "ar";
    j["coeffs"] = ar->coeffs;
    j["noise_std"] = ar->noise_std;
    j["mean"] = NumberOrNull(ar->mean);
  } else if (const auto* c = std::get_if<ConstantProcess>(&p)) {
    j["type"] = "constant";
    j["freq"] = c->freq;
  } else if (const auto* pw = std::get_if<PiecewiseProcess>(&p)) {
    j["type"] = "piecewise";
    j["times_s"] = pw->times_s;
    j["freqs"] = pw->freqs;
  } else if (const auto* off = std::get_if<OffsetProcess>(&p)) {
    j["type"] = "offset";
    j["reference"] = off->reference;
    j["offset"] = off->offset;
  }
  return j;
}

FrequencyProcess ProcessFromJson(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  const Json* type = r.Find("type");
  if (!type || !type->is_string()) Bad(path + ".type", "expected a string");
  const std::string t = type->get<std::string>();
  FrequencyProcess out;
  if (t == "random_walk") {
    RandomWalkProcess p;
    r.GetOptional("start", p.start);
    r.Get("step_std", p.step_std);
    out = p;
  } else if (t == "ar") {
    ArProcess p;
    r.Get("coeffs", p.coeffs);
    r.Get("noise_std", p.noise_std);
    r.GetOptional("mean", p.mean);
    out = p;
  } else if (t == "constant") {
    ConstantProcess p;
    r.Get("freq", p.freq);
    out = p;
  } else if (t == "piecewise") {
    PiecewiseProcess p;
    r.Get("times_s", p.times_s);
    r.Get("freqs", p.freqs);
    out = p;
  } else if (t == "offset") {
    OffsetProcess p;
    r.Get("reference", p.reference);
    r.Get("offset", p.offset);
    out = p;
  } else {
    Bad(path + ".type", "unknown process \"" + t + "\"");
  }
  r.Finish();
  return out;
}

Json SynthToJson(const SynthConfig& s) {
  Json j;
  j["duration_s"] = s.duration_s;
  j["sample_rate_hz"] = s.sample_rate_hz;
  j["units_per_hz"] = s.units_per_hz;
  j["band_min"] = s.band_min;
  j["band_max"] = s.band_max;
  j["snr_db"] = std::isinf(s.snr_db) ? Json("inf") : Json(s.snr_db);
  j["seed"] = s.seed;
  Json traces = Json::array();
  for (const TraceSpec& t : s.traces) {
    Json tj;
    tj["process"] = ProcessToJson(t.process);
    tj["amplitude"] = t.amplitude;
    if (t.unvoiced) tj["unvoiced"] = {t.unvoiced->first, t.unvoiced->second};
    traces.push_back(std::move(tj));
  }
  j["traces"] = std::move(traces);
  return j;
}

SynthConfig SynthFromJson(const Json& j) {
  SynthConfig s;
  ObjectReader r(j, "synth");
  r.Get("duration_s", s.duration_s);
  r.Get("sample_rate_hz", s.sample_rate_hz);
  r.Get("units_per_hz", s.units_per_hz);
  r.Get("band_min", s.band_min);
  r.Get("band_max", s.band_max);
  if (const Json* v = r.Find("snr_db")) {
    if (v->is_string() && v->get<std::string>() == "inf") {
      s.snr_db = std::numeric_limits<double>::infinity();
    } else {
      s.snr_db = ObjectReader::AsDouble(*v, "synth.snr_db");
    }
  }
  r.GetU64("seed", s.seed);
  if (const Json* v = r.Find("traces")) {
    if (!v->is_array()) Bad("synth.traces", "expected an array");
    s.traces.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string path = "synth.traces[" + std::to_string(i) + "]";
      ObjectReader tr((*v)[i], path);
      TraceSpec t;
      if (const Json* p = tr.Find("process")) {
        t.process = ProcessFromJson(*p, path + ".process");
      }
      tr.Get("amplitude", t.amplitude);
      if (const Json* u = tr.Find("unvoiced")) {
        if (!u->is_null()) {
          if (!u->is_array() || u->size() != 2) Bad(path + ".unvoiced", "expected [t1, t2]");
          t.unvoiced = std::pair{ObjectReader::AsDouble((*u)[0], path + ".unvoiced"),
                                 ObjectReader::AsDouble((*u)[1], path + ".unvoiced")};
        }
      }
      tr.Finish();
      s.traces.push_back(std::move(t));
    }
  }
  r.Finish();
  return s;
}

std::string LineError(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

bool ParseSize(std::string_view s, std::size_t& out) {
  s = detail::Trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

bool ParseFlag(std::string_view s, bool& out) {
  s = detail::Trim(s);
  if (s == "1" || s == "true") {
    out = true;
  } else if (s == "0" || s == "false") {
    out = false;
  } else {
    return false;
  }
  return true;
}

std::string ReadText(const std::filesystem::path& path) {
  const auto bytes = detail::ReadAll(path);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace

TransitionModel RunConfig::Model() const {
  return TransitionModel::UniformBand(band, lambda);
}

OnlineParams RunConfig::Online() const {
  OnlineParams p;
  p.k1 = k1;
  p.k2 = k2;
  p.num_traces = num_traces;
  p.models = {Model()};
  p.det = detection;
  return p;
}

void ValidateRunConfig(const RunConfig& c) {
  if (!std::isfinite(c.lambda) || c.lambda < 0.0) Bad("model.lambda", "must be finite and >= 0");
  if (!std::isfinite(c.detection.delta_rer)) Bad("detection.delta_rer", "must be finite");
  if (c.num_traces == 0) Bad("tracking.num_traces", "must be >= 1");
  if (c.max_traces == 0) Bad("tracking.max_traces", "must be >= 1");
  if (!(c.constraints.scale > 1.0) || !std::isfinite(c.constraints.scale)) {
    Bad("tracking.constraint_scale", "must be finite and > 1");
  }
  if (c.constraints.max_rounds == 0) Bad("tracking.constraint_max_rounds", "must be >= 1");
  if (!(c.stft.window_len_s > 0.0)) Bad("stft.window_len_s", "must be > 0");
  if (!(c.stft.overlap_fraction >= 0.0 && c.stft.overlap_fraction < 1.0)) {
    Bad("stft.overlap_fraction", "must be in [0, 1)");
  }
  if (c.stft.zero_pad_factor == 0) Bad("stft.zero_pad_factor", "must be >= 1");
  if (!(c.range.units_per_hz > 0.0)) Bad("stft.units_per_hz", "must be > 0");
  if (!(c.range.max > c.range.min) || c.range.min < 0.0) {
    Bad("stft.band_min", "band must satisfy 0 <= band_min < band_max");
  }
  if (!(c.tau >= 0.0) || !std::isfinite(c.tau)) Bad("eval.tau", "must be finite and >= 0");
  const SynthConfig& s = c.synth;
  if (!(s.duration_s > 0.0) || !std::isfinite(s.duration_s)) Bad("synth.duration_s", "must be > 0");
  if (!(s.sample_rate_hz > 0.0) || !std::isfinite(s.sample_rate_hz)) {
    Bad("synth.sample_rate_hz", "must be > 0");
  }
  if (!(s.units_per_hz > 0.0)) Bad("synth.units_per_hz", "must be > 0");
  if (!(s.band_max > s.band_min)) Bad("synth.band_min", "must be below band_max");
  if (std::isnan(s.snr_db) || s.snr_db < -1e300) Bad("synth.snr_db", "must be a number or \"inf\"");
  for (std::size_t i = 0; i < s.traces.size(); ++i) {
    if (const auto* off = std::get_if<OffsetProcess>(&s.traces[i].process)) {
      if (off->reference >= i) {
        Bad("synth.traces[" + std::to_string(i) + "]", "offset must reference an earlier trace");
      }
    }
  }
}

RunConfig ParseRunConfig(std::string_view json) {
  const Json j = Parse(json, "config");
  RunConfig c;
  ObjectReader root(j, "config");
  if (const Json* v = root.Find("model")) {
    ObjectReader r(*v, "model");
    r.Get("band", c.band);
    r.Get("lambda", c.lambda);
    r.Finish();
  }
  if (const Json* v = root.Find("detection")) {
    ObjectReader r(*v, "detection");
    r.Get("delta_rer", c.detection.delta_rer);
    r.Get("delta_f", c.detection.delta_f);
    r.Get("delta1", c.detection.delta1);
    r.Get("delta2", c.detection.delta2);
    r.Finish();
  }
  if (const Json* v = root.Find("tracking")) {
    ObjectReader r(*v, "tracking");
    r.Get("num_traces", c.num_traces);
    r.Get("max_traces", c.max_traces);
    r.Get("constraint_scale", c.constraints.scale);
    r.Get("constraint_max_rounds", c.constraints.max_rounds);
    r.Finish();
  }
  if (const Json* v = root.Find("online")) {
    ObjectReader r(*v, "online");
    r.Get("k1", c.k1);
    r.Get("k2", c.k2);
    r.Finish();
  }
  if (const Json* v = root.Find("stft")) {
    ObjectReader r(*v, "stft");
    r.Get("window_len_s", c.stft.window_len_s);
    r.Get("overlap_fraction", c.stft.overlap_fraction);
    r.Get("zero_pad_factor", c.stft.zero_pad_factor);
    r.Get("dft_len", c.stft.dft_len);
    if (const Json* w = r.Find("window")) {
      if (!w->is_string() || w->get<std::string>() != "rectangular") {
        Bad("stft.window", "only \"rectangular\" is supported");
      }
    }
    r.Get("band_min", c.range.min);
    r.Get("band_max", c.range.max);
    r.Get("units_per_hz", c.range.units_per_hz);
    r.Finish();
  }
  if (const Json* v = root.Find("eval")) {
    ObjectReader r(*v, "eval");
    r.Get("tau", c.tau);
    r.Finish();
  }
  if (const Json* v = root.Find("synth")) c.synth = SynthFromJson(*v);
  root.Finish();
  ValidateRunConfig(c);
  return c;
}

std::string SerializeRunConfig(const RunConfig& c) {
  Json j;
  j["model"] = {{"band", c.band}, {"lambda", c.lambda}};
  j["detection"] = {{"delta_rer", c.detection.delta_rer},
                    {"delta_f", c.detection.delta_f},
                    {"delta1", c.detection.delta1},
                    {"delta2", c.detection.delta2}};
  j["tracking"] = {{"num_traces", c.num_traces},
                   {"max_traces", c.max_traces},
                   {"constraint_scale", c.constraints.scale},
                   {"constraint_max_rounds", c.constraints.max_rounds}};
  j["online"] = {{"k1", c.k1}, {"k2", c.k2}};
  j["stft"] = {{"window_len_s", c.stft.window_len_s},
               {"overlap_fraction", c.stft.overlap_fraction},
               {"zero_pad_factor", c.stft.zero_pad_factor},
               {"dft_len", c.stft.dft_len},
               {"window", "rectangular"},
               {"band_min", c.range.min},
               {"band_max", c.range.max},
               {"units_per_hz", c.range.units_per_hz}};
  j["eval"] = {{"tau", c.tau}};
  j["synth"] = SynthToJson(c.synth);
  return j.dump(2);
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  return ParseRunConfig(ReadText(path));
}

std::vector<IterationConstraint> ParseConstraints(std::string_view json) {
  const Json j = Parse(json, "constraints");
  if (!j.is_array()) Bad("constraints", "expected an array");
  std::vector<IterationConstraint> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = "constraints[" + std::to_string(i) + "]";
    ObjectReader r(j[i], path);
    auto range = [&](const char* key) {
      const Json* v = r.Find(key);
      if (!v || !v->is_array() || v->size() != 2) {
        Bad(r.Where(key), "expected [first, last]");
      }
      const std::size_t a = ObjectReader::AsSize((*v)[0], r.Where(key));
      const std::size_t b = ObjectReader::AsSize((*v)[1], r.Where(key));
      if (b < a) Bad(r.Where(key), "last precedes first");
      return std::pair{a, b};
    };
    const auto [f0, f1] = range("frames");
    const auto [b0, b1] = range("bins");
    std::size_t iteration = 1;
    r.Get("iteration", iteration);
    if (iteration == 0) Bad(r.Where("iteration"), "rounds are numbered from 1");
    r.Finish();
    out.push_back({iteration - 1, ConstraintRegion::Rectangle(f0, f1, b0, b1)});
  }
  return out;
}

std::string SerializeConstraints(const std::vector<IterationConstraint>& cs) {
  Json j = Json::array();
  for (const auto& c : cs) {
    const ConstraintRegion& r = c.region;
    std::size_t lo = r.bin_lo.empty() ? 0 : r.bin_lo.front();
    std::size_t hi = r.bin_hi.empty() ? 0 : r.bin_hi.front();
    for (std::size_t i = 0; i < r.bin_lo.size(); ++i) {
      lo = std::min(lo, r.bin_lo[i]);
      hi = std::max(hi, r.bin_hi[i]);
    }
    j.push_back({{"frames", {r.first_frame, r.last_frame}},
                 {"bins", {lo, hi}},
                 {"iteration", c.iteration + 1}});
  }
  return j.dump();
}

std::string ResultToJson(const MultiTraceResult& result) {
  Json j;
  j["count"] = result.count();
  Json traces = Json::array();
  Json freqs = Json::array();
  for (const Trace& t : result.traces) {
    traces.push_back(t.bins);
    Json f = Json::array();
    for (std::size_t b : t.bins) f.push_back(result.freq_axis.at(static_cast<double>(b)));
    freqs.push_back(std::move(f));
  }
  j["traces"] = std::move(traces);
  j["freqs"] = std::move(freqs);
  Json masks = Json::array();
  for (const VoicedMask& m : result.masks) {
    Json row = Json::array();
    for (bool v : m) row.push_back(v);
    masks.push_back(std::move(row));
  }
  j["masks"] = std::move(masks);
  Json mean = Json::array();
  for (double v : result.mean_rer) mean.push_back(NumberOrNull(v));
  j["mean_rer"] = std::move(mean);
  j["freq_axis"] = {{"f0", result.freq_axis.origin}, {"df", result.freq_axis.step}};
  return j.dump();
}

std::string MetricReportToJson(const MetricReport& report) {
  Json j;
  j["tau"] = report.tau;
  j["rmse"] = report.single.rmse;
  j["erate"] = report.single.erate;
  j["ecount"] = report.single.ecount;
  j["pearson_rho"] = report.pearson ? Json(*report.pearson) : Json(nullptr);
  if (report.multi) {
    const MultiMetrics& m = *report.multi;
    Json mj;
    for (std::size_t i = 0; i < m.confusion.size(); ++i) {
      for (std::size_t k = 0; k < m.confusion.size(); ++k) {
        if (i != k) mj["E" + std::to_string(i) + std::to_string(k)] = m.confusion[i][k];
      }
    }
    mj["E_Gross"] = m.gross;
    mj["E_fine"] = m.fine;
    mj["E_fine_per_trace"] = m.fine_per_trace;
    mj["E_Total"] = m.total;
    j["multi"] = std::move(mj);
  } else {
    j["multi"] = nullptr;
  }
  return j.dump();
}

std::string EstimateToJson(const OnlineEstimate& est, const AxisMap& freq_axis) {
  Json j;
  j["frame"] = est.frame;
  j["bins"] = est.bins;
  Json f = Json::array();
  for (std::size_t b : est.bins) f.push_back(freq_axis.at(static_cast<double>(b)));
  j["freqs"] = std::move(f);
  Json v = Json::array();
  for (bool x : est.voiced) v.push_back(x);
  j["voiced"] = std::move(v);
  return j.dump();
}

std::string ErrorToJson(std::string_view code, std::string_view message) {
  Json j;
  j["error"] = {{"code", std::string(code)}, {"message", std::string(message)}};
  return j.dump();
}

void WriteTraceCsv(std::ostream& out, const Trace& trace, const VoicedMask& mask,
                   const AxisMap& freq_axis) {
  if (!mask.empty() && mask.size() != trace.size()) {
    throw InputError("dimension_mismatch", "mask length differs from the trace");
  }
  out << "frame,bin,freq_physical,voiced\n";
  for (std::size_t n = 0; n < trace.size(); ++n) {
    const bool voiced = mask.empty() || mask[n];
    out << n << ',' << trace[n] << ','
        << FormatDouble(freq_axis.at(static_cast<double>(trace[n]))) << ','
        << (voiced ? 1 : 0) << '\n';
  }
}

TraceTable ReadTraceCsv(std::istream& in) {
  TraceTable t;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = detail::Trim(line);
    if (s.empty()) continue;
    if (!header) {
      if (s != "frame,bin,freq_physical,voiced") {
        throw InputError("malformed_row", LineError(lineno, "expected trace CSV header"));
      }
      header = true;
      continue;
    }
    const auto cells = detail::SplitCsv(s);
    std::size_t frame = 0, bin = 0;
    double f = 0.0;
    bool v = false;
    if (cells.size() != 4 || !ParseSize(cells[0], frame) || !ParseSize(cells[1], bin) ||
        !detail::ParseDouble(cells[2], f) || !ParseFlag(cells[3], v)) {
      throw InputError("malformed_row", LineError(lineno, "expected frame,bin,freq,voiced"));
    }
    if (frame != t.bins.size()) {
      throw InputError("malformed_row", LineError(lineno, "frames must be consecutive from 0"));
    }
    t.bins.push_back(bin);
    t.freq.push_back(f);
    t.voiced.push_back(v);
  }
  if (!header) throw InputError("empty_input", "empty trace file");
  return t;
}

TraceTable LoadTraceCsv(const std::filesystem::path& path) {
  std::istringstream in(ReadText(path));
  return ReadTraceCsv(in);
}

void WriteGroundTruthCsv(std::ostream& out, const GroundTruth& gt,
                         const AxisMap& time_axis) {
  out << "frame,time_s";
  for (std::size_t l = 0; l < gt.freq.size(); ++l) out << ",freq_" << l << ",voiced_" << l;
  out << '\n';
  for (std::size_t n = 0; n < gt.frames(); ++n) {
    out << n << ',' << FormatDouble(time_axis.at(static_cast<double>(n)));
    for (std::size_t l = 0; l < gt.freq.size(); ++l) {
      out << ',' << FormatDouble(gt.freq[l][n]) << ',' << (gt.voiced[l][n] ? 1 : 0);
    }
    out << '\n';
  }
}

GroundTruth ReadGroundTruthCsv(std::istream& in) {
  GroundTruth gt;
  std::string line;
  std::size_t lineno = 0;
  std::size_t traces = 0;
  bool header = false;
  std::size_t frames = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = detail::Trim(line);
    if (s.empty()) continue;
    const auto cells = detail::SplitCsv(s);
    if (!header) {
      if (cells.size() < 2 || cells.size() % 2 != 0 || cells[0] != "frame" ||
          cells[1] != "time_s") {
        throw InputError("malformed_row", LineError(lineno, "expected ground-truth header"));
      }
      traces = (cells.size() - 2) / 2;
      gt.freq.resize(traces);
      gt.voiced.resize(traces);
      header = true;
      continue;
    }
    std::size_t frame = 0;
    double t = 0.0;
    if (cells.size() != 2 + 2 * traces || !ParseSize(cells[0], frame) ||
        !detail::ParseDouble(cells[1], t) || frame != frames) {
      throw InputError("malformed_row", LineError(lineno, "bad ground-truth row"));
    }
    for (std::size_t l = 0; l < traces; ++l) {
      double f = 0.0;
      bool v = false;
      if (!detail::ParseDouble(cells[2 + 2 * l], f) || !ParseFlag(cells[3 + 2 * l], v)) {
        throw InputError("malformed_row", LineError(lineno, "bad ground-truth value"));
      }
      gt.freq[l].push_back(f);
      gt.voiced[l].push_back(v);
    }
    ++frames;
  }
  if (!header) throw InputError("empty_input", "empty ground-truth file");
  return gt;
}

GroundTruth LoadGroundTruthCsv(const std::filesystem::path& path) {
  std::istringstream in(ReadText(path));
  return ReadGroundTruthCsv(in);
}

}  // namespace amtc
