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

#include "amtc/spectrogram.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <memory>
#include <sstream>

#include "amtc/error.hpp"
#include "text_util.hpp"

namespace amtc {

Spectrogram::Spectrogram(std::size_t bins, std::size_t frames, AxisMap freq,
                         AxisMap time)
    : bins_(bins), frames_(frames), values_(bins * frames, 0.0), freq_(freq),
      time_(time) {}

Spectrogram::Spectrogram(std::size_t bins, std::size_t frames,
                         std::vector<double> column_major, AxisMap freq,
                         AxisMap time)
    : bins_(bins), frames_(frames), values_(std::move(column_major)),
      freq_(freq), time_(time) {
  if (values_.size() != bins_ * frames_) {
    throw InputError("dimension_mismatch",
                     "spectrogram data has " + std::to_string(values_.size()) +
                         " values, expected " + std::to_string(bins_) + "x" +
                         std::to_string(frames_));
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InputError("negative_magnitude",
                       "spectrogram values must be finite and nonnegative");
    }
  }
}

Spectrogram Spectrogram::FromRows(const std::vector<std::vector<double>>& rows,
                                  AxisMap freq, AxisMap time) {
  const std::size_t bins = rows.size();
  const std::size_t frames = bins == 0 ? 0 : rows.front().size();
  std::vector<double> data(bins * frames);
  for (std::size_t m = 0; m < bins; ++m) {
    if (rows[m].size() != frames) {
      throw InputError("dimension_mismatch", "ragged spectrogram rows");
    }
    for (std::size_t n = 0; n < frames; ++n) data[n * bins + m] = rows[m][n];
  }
  return Spectrogram(bins, frames, std::move(data), freq, time);
}

Spectrogram Spectrogram::SliceFrames(std::size_t first,
                                     std::size_t count) const {
  if (first + count > frames_) {
    throw InputError("out_of_range", "frame slice exceeds spectrogram");
  }
  Spectrogram out(bins_, count, freq_,
                  AxisMap{time_.at(static_cast<double>(first)), time_.step});
  std::copy(values_.begin() + static_cast<std::ptrdiff_t>(first * bins_),
            values_.begin() + static_cast<std::ptrdiff_t>((first + count) * bins_),
            out.values_.begin());
  return out;
}

std::size_t StftLayout::FrameCount(std::size_t num_samples) const {
  if (num_samples < window) return 0;
  return (num_samples - window) / hop + 1;
}

StftLayout ResolveLayout(const StftConfig& cfg, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0)) {
    throw InputError("bad_config", "sample rate must be positive");
  }
  if (!(cfg.overlap_fraction >= 0.0 && cfg.overlap_fraction < 1.0)) {
    throw InputError("bad_config", "overlap_fraction must be in [0, 1)");
  }
  if (cfg.zero_pad_factor == 0) {
    throw InputError("bad_config", "zero_pad_factor must be positive");
  }
  StftLayout layout;
  layout.window =
      static_cast<std::size_t>(std::llround(cfg.window_len_s * sample_rate_hz));
  if (layout.window < 2) {
    throw InputError("bad_config", "window must span at least two samples");
  }
  layout.hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(
             static_cast<double>(layout.window) * (1.0 - cfg.overlap_fraction))));
  layout.dft_len = cfg.dft_len != 0 ? cfg.dft_len
                                    : layout.window * cfg.zero_pad_factor;
  if (layout.dft_len < layout.window) {
    throw InputError("bad_config", "dft_len shorter than the window");
  }
  return layout;
}

namespace {

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

Spectrogram ComputeSpectrogram(const TimeSeries& ts, const StftConfig& cfg,
                               const FrequencyRange& range) {
  const StftLayout layout = ResolveLayout(cfg, ts.sample_rate_hz);
  const std::size_t frames = layout.FrameCount(ts.samples.size());
  if (frames == 0) {
    throw InputError("signal_too_short",
                     "signal has " + std::to_string(ts.samples.size()) +
                         " samples, window needs " +
                         std::to_string(layout.window));
  }
  if (!(range.units_per_hz > 0.0) || !(range.max >= range.min)) {
    throw InputError("bad_config", "invalid frequency range");
  }

  const double df_hz = layout.BinSpacingHz(ts.sample_rate_hz);
  const std::size_t half = layout.dft_len / 2;
  const double lo_hz = range.min / range.units_per_hz;
  const double hi_hz = range.max / range.units_per_hz;
  // Tolerate representation error at the range edges.
  const double eps = 1e-9;
  const auto first = static_cast<std::size_t>(
      std::max(0.0, std::ceil(lo_hz / df_hz - eps)));
  const auto last = static_cast<std::size_t>(std::min<double>(
      static_cast<double>(half), std::floor(hi_hz / df_hz + eps)));
  if (first > last) {
    throw InputError("empty_range", "no DFT bin falls inside the range");
  }
  const std::size_t bins = last - first + 1;

  std::unique_ptr<double, FftwFree> in(
      static_cast<double*>(fftw_malloc(sizeof(double) * layout.dft_len)));
  std::unique_ptr<fftw_complex, FftwFree> out(static_cast<fftw_complex*>(
      fftw_malloc(sizeof(fftw_complex) * (half + 1))));
  std::unique_ptr<fftw_plan_s, FftwPlanDeleter> plan(fftw_plan_dft_r2c_1d(
      static_cast<int>(layout.dft_len), in.get(), out.get(), FFTW_ESTIMATE));

  const AxisMap freq{static_cast<double>(first) * df_hz * range.units_per_hz,
                     df_hz * range.units_per_hz};
  const AxisMap time{
      static_cast<double>(layout.window) / (2.0 * ts.sample_rate_hz),
      static_cast<double>(layout.hop) / ts.sample_rate_hz};
  Spectrogram z(bins, frames, freq, time);

  double* buf = in.get();
  for (std::size_t n = 0; n < frames; ++n) {
    const double* src = ts.samples.data() + n * layout.hop;
    std::copy(src, src + layout.window, buf);
    std::fill(buf + layout.window, buf + layout.dft_len, 0.0);
    fftw_execute(plan.get());
    auto col = z.column(n);
    for (std::size_t m = 0; m < bins; ++m) {
      const fftw_complex& c = out.get()[first + m];
      col[m] = std::hypot(c[0], c[1]);
    }
  }
  return z;
}

TimeSeries Decimate(const TimeSeries& ts, unsigned factor) {
  if (factor == 0) throw InputError("bad_config", "decimation factor is 0");
  if (factor == 1) return ts;
  TimeSeries out;
  out.sample_rate_hz = ts.sample_rate_hz / factor;
  const std::size_t count = ts.samples.size() / factor;
  out.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double acc = 0.0;
    for (unsigned j = 0; j < factor; ++j) acc += ts.samples[i * factor + j];
    out.samples.push_back(acc / factor);
  }
  return out;
}

Spectrogram RescaleHarmonic(const Spectrogram& band, unsigned order,
                            AxisMap nominal_axis, std::size_t bins) {
  if (order == 0) throw InputError("bad_config", "harmonic order is 0");
  Spectrogram out(bins, band.frames(), nominal_axis, band.time_axis());
  const AxisMap& src = band.freq_axis();
  for (std::size_t m = 0; m < bins; ++m) {
    const double f = order * nominal_axis.at(static_cast<double>(m));
    const double pos = (f - src.origin) / src.step;
    if (pos < 0.0 || pos > static_cast<double>(band.bins() - 1)) continue;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, band.bins() - 1);
    const double w = pos - static_cast<double>(lo);
    for (std::size_t n = 0; n < band.frames(); ++n) {
      out(m, n) = (1.0 - w) * band(lo, n) + w * band(hi, n);
    }
  }
  return out;
}

double FrameSnr(std::span<const double> column) {
  if (column.empty()) return 1.0;
  const auto peak_it = std::max_element(column.begin(), column.end());
  const double peak = *peak_it;
  if (peak <= 0.0) return 1.0;
  if (column.size() == 1) return 1.0;
  double rest = 0.0;
  for (auto it = column.begin(); it != column.end(); ++it) {
    if (it != peak_it) rest += *it;
  }
  if (rest <= 0.0) return std::numeric_limits<double>::infinity();
  return peak * static_cast<double>(column.size() - 1) / rest;
}

Spectrogram HarmonicCombine(const std::vector<Spectrogram>& bands,
                            const std::vector<unsigned>& orders) {
  if (bands.empty()) throw InputError("empty_input", "no harmonic bands");
  if (orders.size() != bands.size()) {
    throw InputError("dimension_mismatch",
                     "one harmonic order is required per band");
  }
  const std::size_t bins = bands.front().bins();
  const std::size_t frames = bands.front().frames();
  for (const auto& b : bands) {
    if (b.bins() != bins || b.frames() != frames) {
      throw InputError("dimension_mismatch",
                       "harmonic bands must share one M x N grid");
    }
  }

  Spectrogram out(bins, frames, bands.front().freq_axis(),
                  bands.front().time_axis());
  std::vector<double> weights(bands.size());
  for (std::size_t n = 0; n < frames; ++n) {
    std::size_t infinite = 0;
    double total = 0.0;
    for (std::size_t b = 0; b < bands.size(); ++b) {
      weights[b] = FrameSnr(bands[b].column(n));
      if (std::isinf(weights[b])) {
        ++infinite;
      } else {
        total += weights[b];
      }
    }
    for (std::size_t b = 0; b < bands.size(); ++b) {
      if (infinite > 0) {
        weights[b] = std::isinf(weights[b]) ? 1.0 / infinite : 0.0;
      } else {
        weights[b] /= total;
      }
    }
    auto dst = out.column(n);
    for (std::size_t m = 0; m < bins; ++m) {
      double acc = 0.0;
      for (std::size_t b = 0; b < bands.size(); ++b) {
        acc += weights[b] * bands[b](m, n);
      }
      dst[m] = acc;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Time series I/O

TimeSeries ParseTimeSeriesCsv(std::istream& in, double csv_rate_hz) {
  std::vector<double> times;
  TimeSeries ts;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  bool header_seen = false;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view trimmed = detail::Trim(line);
    if (trimmed.empty()) continue;
    const auto fields = detail::SplitCsv(trimmed);
    values.assign(fields.size(), 0.0);
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      numeric = numeric && detail::ParseDouble(fields[i], values[i]);
    }
    if (!numeric) {
      // A single non-numeric header row is allowed before any data.
      if (ts.samples.empty() && !header_seen) {
        header_seen = true;
        continue;
      }
      throw InputError("malformed_row", "line " + std::to_string(line_no) +
                                            ": not a number");
    }
    if (values.size() != 1 && values.size() != 2) {
      throw InputError("malformed_row", "line " + std::to_string(line_no) +
                                            ": expected 1 or 2 columns");
    }
    if (columns == 0) columns = values.size();
    if (values.size() != columns) {
      throw InputError("malformed_row", "line " + std::to_string(line_no) +
                                            ": inconsistent column count");
    }
    if (columns == 2) times.push_back(values[0]);
    ts.samples.push_back(values.back());
  }
  if (ts.samples.empty()) throw InputError("empty_input", "empty input");

  if (csv_rate_hz > 0.0) {
    ts.sample_rate_hz = csv_rate_hz;
  } else if (columns == 2 && times.size() >= 2) {
    const double span = times.back() - times.front();
    if (!(span > 0.0)) {
      throw InputError("malformed_row", "time column is not increasing");
    }
    ts.sample_rate_hz = static_cast<double>(times.size() - 1) / span;
  } else {
    throw InputError("missing_rate",
                     "sample rate required for single-column CSV input");
  }
  return ts;
}

namespace {

std::uint32_t ReadLe32(std::span<const unsigned char> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t ReadLe16(std::span<const unsigned char> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

void PutLe32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void PutLe16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

}  // namespace

namespace detail {

std::vector<unsigned char> ReadAll(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw InputError("not_found", "input not found: " + path.string());
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("unreadable", "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  if (f.bad()) throw InputError("unreadable", "read failed: " + path.string());
  return bytes;
}

}  // namespace detail

TimeSeries ParseWav(std::span<const unsigned char> bytes) {
  if (bytes.empty()) throw InputError("empty_input", "empty input");
  if (bytes.size() < 12 || std::string(bytes.begin(), bytes.begin() + 4) != "RIFF" ||
      std::string(bytes.begin() + 8, bytes.begin() + 12) != "WAVE") {
    throw InputError("malformed_wav", "not a RIFF/WAVE file");
  }
  std::size_t pos = 12;
  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0, format = 0;
  std::uint32_t rate = 0;
  while (pos + 8 <= bytes.size()) {
    const std::string id(bytes.begin() + pos, bytes.begin() + pos + 4);
    const std::uint32_t size = ReadLe32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      throw InputError("malformed_wav", "truncated '" + id + "' chunk");
    }
    if (id == "fmt ") {
      if (size < 16) throw InputError("malformed_wav", "short fmt chunk");
      format = ReadLe16(bytes, body);
      channels = ReadLe16(bytes, body + 2);
      rate = ReadLe32(bytes, body + 4);
      bits = ReadLe16(bytes, body + 14);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw InputError("malformed_wav", "data before fmt");
      if (format != 1 || bits != 16 || channels != 1) {
        throw InputError("unsupported_encoding",
                         "only 16-bit PCM mono WAV is supported (format " +
                             std::to_string(format) + ", " +
                             std::to_string(bits) + " bits, " +
                             std::to_string(channels) + " channels)");
      }
      if (rate == 0) throw InputError("malformed_wav", "zero sample rate");
      TimeSeries ts;
      ts.sample_rate_hz = rate;
      const std::size_t count = size / 2;
      if (count == 0) throw InputError("empty_input", "empty input");
      ts.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const auto raw = static_cast<std::int16_t>(ReadLe16(bytes, body + 2 * i));
        ts.samples[i] = static_cast<double>(raw) / 32768.0;
      }
      return ts;
    }
    pos = body + size + (size & 1u);
  }
  throw InputError("malformed_wav", "no data chunk");
}

TimeSeries LoadTimeSeries(const std::filesystem::path& path,
                          TimeSeriesFormat format, double csv_rate_hz) {
  const auto bytes = detail::ReadAll(path);
  if (bytes.empty()) throw InputError("empty_input", "empty input");
  if (format == TimeSeriesFormat::kWav) return ParseWav(bytes);
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  return ParseTimeSeriesCsv(in, csv_rate_hz);
}

std::vector<unsigned char> EncodeWav(const TimeSeries& ts, double peak) {
  if (!(peak > 0.0)) throw InputError("bad_config", "peak must be positive");
  const auto rate = static_cast<std::uint32_t>(std::llround(ts.sample_rate_hz));
  const auto data_bytes = static_cast<std::uint32_t>(ts.samples.size() * 2);
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  for (char c : std::string_view("RIFF")) out.push_back(static_cast<unsigned char>(c));
  PutLe32(out, 36 + data_bytes);
  for (char c : std::string_view("WAVEfmt ")) out.push_back(static_cast<unsigned char>(c));
  PutLe32(out, 16);
  PutLe16(out, 1);
  PutLe16(out, 1);
  PutLe32(out, rate);
  PutLe32(out, rate * 2);
  PutLe16(out, 2);
  PutLe16(out, 16);
  for (char c : std::string_view("data")) out.push_back(static_cast<unsigned char>(c));
  PutLe32(out, data_bytes);
  for (double s : ts.samples) {
    const double x = std::clamp(s / peak, -1.0, 1.0);
    const auto q = static_cast<std::int16_t>(
        std::clamp<long>(std::lround(x * 32767.0), -32768, 32767));
    PutLe16(out, static_cast<std::uint16_t>(q));
  }
  return out;
}

void SaveWav(const std::filesystem::path& path, const TimeSeries& ts,
             double peak) {
  const auto bytes = EncodeWav(ts, peak);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("unwritable", "cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
}

// ---------------------------------------------------------------------------
// Spectrogram CSV

std::string FormatDouble(double v) { return detail::FormatDouble(v); }

Spectrogram ReadSpectrogramCsv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&](std::string& dst) {
    while (std::getline(in, dst)) {
      ++line_no;
      if (!detail::Trim(dst).empty()) return true;
    }
    return false;
  };
  if (!next(line)) throw InputError("empty_input", "empty input");
  if (detail::Trim(line) == "M,N,f0,df,t0,dt" && !next(line)) {
    throw InputError("malformed_header", "missing spectrogram header values");
  }
  const auto head = detail::SplitCsv(detail::Trim(line));
  if (head.size() != 6) {
    throw InputError("malformed_header",
                     "header must be M,N,f0,df,t0,dt (6 fields)");
  }
  std::array<double, 6> h{};
  for (std::size_t i = 0; i < 6; ++i) {
    if (!detail::ParseDouble(head[i], h[i])) {
      throw InputError("malformed_header",
                       "non-numeric header field '" + std::string(head[i]) + "'");
    }
  }
  if (h[0] < 1 || h[1] < 1 || h[0] != std::floor(h[0]) || h[1] != std::floor(h[1])) {
    throw InputError("malformed_header", "M and N must be positive integers");
  }
  if (!(h[3] > 0.0)) {
    throw InputError("malformed_header", "df must be positive");
  }
  const auto bins = static_cast<std::size_t>(h[0]);
  const auto frames = static_cast<std::size_t>(h[1]);
  std::vector<double> data;
  data.reserve(bins * frames);
  for (std::size_t n = 0; n < frames; ++n) {
    if (!next(line)) {
      throw InputError("malformed_row", "expected " + std::to_string(frames) +
                                            " frames, got " + std::to_string(n));
    }
    const auto fields = detail::SplitCsv(detail::Trim(line));
    if (fields.size() != bins) {
      throw InputError("malformed_row", "line " + std::to_string(line_no) +
                                            ": expected " + std::to_string(bins) +
                                            " values");
    }
    for (auto f : fields) {
      double v = 0.0;
      if (!detail::ParseDouble(f, v)) {
        throw InputError("malformed_row", "line " + std::to_string(line_no) +
                                              ": not a number");
      }
      data.push_back(v);
    }
  }
  return Spectrogram(bins, frames, std::move(data), AxisMap{h[2], h[3]},
                     AxisMap{h[4], h[5]});
}

void WriteSpectrogramCsv(std::ostream& out, const Spectrogram& z) {
  out << z.bins() << ',' << z.frames() << ',' << FormatDouble(z.freq_axis().origin)
      << ',' << FormatDouble(z.freq_axis().step) << ','
      << FormatDouble(z.time_axis().origin) << ','
      << FormatDouble(z.time_axis().step) << '\n';
  for (std::size_t n = 0; n < z.frames(); ++n) {
    const auto col = z.column(n);
    for (std::size_t m = 0; m < col.size(); ++m) {
      if (m) out << ',';
      out << FormatDouble(col[m]);
    }
    out << '\n';
  }
}

Spectrogram LoadSpectrogramCsv(const std::filesystem::path& path) {
  const auto bytes = detail::ReadAll(path);
  if (bytes.empty()) throw InputError("empty_input", "empty input");
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  return ReadSpectrogramCsv(in);
}

void SaveSpectrogramCsv(const std::filesystem::path& path,
                        const Spectrogram& z) {
  std::ofstream f(path);
  if (!f) throw InputError("unwritable", "cannot write " + path.string());
  WriteSpectrogramCsv(f, z);
}

}  // namespace amtc
