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

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace amtc {

// index -> physical value, origin + index * step.
struct AxisMap {
  double origin = 0.0;
  double step = 1.0;

  double at(double index) const { return origin + index * step; }
  bool operator==(const AxisMap&) const = default;
};

struct TimeSeries {
  std::vector<double> samples;
  double sample_rate_hz = 1.0;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Nonnegative magnitude image with `bins` frequency rows and `frames` time
// columns. Storage is column-major so that one frame is contiguous.
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(std::size_t bins, std::size_t frames, AxisMap freq = {},
              AxisMap time = {});
  // `column_major` holds frames * bins values; throws InputError on a size
  // mismatch or a negative / non-finite entry.
  Spectrogram(std::size_t bins, std::size_t frames,
              std::vector<double> column_major, AxisMap freq = {},
              AxisMap time = {});

  // rows[m][n], convenient for small hand-written matrices.
  static Spectrogram FromRows(const std::vector<std::vector<double>>& rows,
                              AxisMap freq = {}, AxisMap time = {});

  std::size_t bins() const { return bins_; }
  std::size_t frames() const { return frames_; }
  bool empty() const { return bins_ == 0 || frames_ == 0; }

  double operator()(std::size_t bin, std::size_t frame) const {
    return values_[frame * bins_ + bin];
  }
  double& operator()(std::size_t bin, std::size_t frame) {
    return values_[frame * bins_ + bin];
  }

  std::span<const double> column(std::size_t frame) const {
    return {values_.data() + frame * bins_, bins_};
  }
  std::span<double> column(std::size_t frame) {
    return {values_.data() + frame * bins_, bins_};
  }

  const std::vector<double>& values() const { return values_; }

  const AxisMap& freq_axis() const { return freq_; }
  const AxisMap& time_axis() const { return time_; }
  void set_freq_axis(AxisMap axis) { freq_ = axis; }
  void set_time_axis(AxisMap axis) { time_ = axis; }

  // Frames [first, first + count), with the time axis shifted accordingly.
  Spectrogram SliceFrames(std::size_t first, std::size_t count) const;

  bool operator==(const Spectrogram&) const = default;

 private:
  std::size_t bins_ = 0;
  std::size_t frames_ = 0;
  std::vector<double> values_;
  AxisMap freq_;
  AxisMap time_;
};

enum class WindowShape { kRectangular };

struct StftConfig {
  double window_len_s = 10.0;
  double overlap_fraction = 0.0;
  unsigned zero_pad_factor = 1;
  // Explicit DFT length in samples; 0 means window * zero_pad_factor. Needed
  // when the requested bin spacing is not an integer multiple of the window.
  std::size_t dft_len = 0;
  WindowShape window_shape = WindowShape::kRectangular;
};

// Retained band [min, max], expressed in `units_per_hz` (1 for Hz, 60 for
// bpm). The output frequency axis uses the same unit.
struct FrequencyRange {
  double min = 0.0;
  double max = 0.0;
  double units_per_hz = 1.0;
};

// Derived framing for a given signal rate.
struct StftLayout {
  std::size_t window = 0;
  std::size_t hop = 0;
  std::size_t dft_len = 0;

  std::size_t FrameCount(std::size_t num_samples) const;
  double BinSpacingHz(double sample_rate_hz) const {
    return sample_rate_hz / static_cast<double>(dft_len);
  }
};

StftLayout ResolveLayout(const StftConfig& cfg, double sample_rate_hz);

// Magnitude STFT restricted to `range`. Frame n starts at sample n * hop; the
// time axis reports frame centres in seconds.
Spectrogram ComputeSpectrogram(const TimeSeries& ts, const StftConfig& cfg,
                               const FrequencyRange& range);

// Integer decimation with a length-`factor` moving-average pre-filter.
TimeSeries Decimate(const TimeSeries& ts, unsigned factor);

// Resamples a band computed around harmonic `order` onto the nominal axis
// (bins * nominal_axis), i.e. nominal bin m reads the band at order * f(m).
// Linear interpolation; points outside the band read 0.
Spectrogram RescaleHarmonic(const Spectrogram& band, unsigned order,
                            AxisMap nominal_axis, std::size_t bins);

// Per-frame local SNR of one band: column peak over the mean of the remaining
// bins. 1 for an all-zero column; +inf when only the peak is nonzero.
double FrameSnr(std::span<const double> column);

// Frame-wise convex combination of harmonic bands already rescaled to a
// common nominal axis, weighted by FrameSnr. When some bands report +inf SNR
// the weight is shared equally among those bands only.
Spectrogram HarmonicCombine(const std::vector<Spectrogram>& bands,
                            const std::vector<unsigned>& orders);

enum class TimeSeriesFormat { kWav, kCsv };

// CSV rows are either "amplitude" or "time,amplitude". One-column files need
// `csv_rate_hz`; two-column files infer it from the time column when
// `csv_rate_hz` is 0.
TimeSeries LoadTimeSeries(const std::filesystem::path& path,
                          TimeSeriesFormat format, double csv_rate_hz = 0.0);
TimeSeries ParseTimeSeriesCsv(std::istream& in, double csv_rate_hz = 0.0);
TimeSeries ParseWav(std::span<const unsigned char> bytes);

// 16-bit PCM mono; samples are clipped to [-1, 1] before quantisation.
std::vector<unsigned char> EncodeWav(const TimeSeries& ts, double peak = 1.0);
void SaveWav(const std::filesystem::path& path, const TimeSeries& ts,
             double peak = 1.0);

// Spectrogram interchange CSV: a header "M,N,f0,df,t0,dt" of values, then N
// lines of M magnitudes (one frame per line). A literal "M,N,f0,df,t0,dt"
// name line before the header is accepted on input.
Spectrogram ReadSpectrogramCsv(std::istream& in);
void WriteSpectrogramCsv(std::ostream& out, const Spectrogram& z);
Spectrogram LoadSpectrogramCsv(const std::filesystem::path& path);
void SaveSpectrogramCsv(const std::filesystem::path& path, const Spectrogram& z);

// Shortest round-trip decimal form, shared by every text writer.
std::string FormatDouble(double v);

}  // namespace amtc
