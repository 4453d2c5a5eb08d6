// core/include/wavepmf/filterbank.hpp

// Copyright 2026  wavepmf authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "wavepmf/audio.hpp"

namespace wavepmf {

// FIR realization throughout: truncated impulse responses give exact,
// linear-algebraic reproducibility of the per-channel signals.
struct FilterBankSpec {
  int sample_rate = 16000;
  int n_channels_per_family = 10;
  double f_min = 70.0;
  double f_max = 0.0;  // 0 means 0.45 * sample_rate
  int order = 4;
  int fir_length = 2048;

  double effective_f_max() const { return f_max > 0.0 ? f_max : 0.45 * sample_rate; }
};

enum class FilterFamily { Gammatone, InverseGammatone };

const char* family_name(FilterFamily f);

struct FilterChannel {
  FilterFamily family = FilterFamily::Gammatone;
  double center_freq = 0.0;
  std::vector<double> coefficients;  // unit l2 norm
  int channel_index = 0;             // 0..9 gammatone, 10..19 inverse, ascending f_c
  int group_delay = 0;               // samples; peak-|tap| index or (L-1)/2
  double bank_gain = 1.0;            // bank-global output gain (anti-clipping)
};

struct FilterBank {
  FilterBankSpec spec;
  std::vector<FilterChannel> channels;
  double gain = 1.0;
};

// ERB(f) = 24.7 * (4.37 f / 1000 + 1); ERB-rate spacing for center freqs.
double erb_bandwidth(double freq_hz);
double erb_rate(double freq_hz);
double erb_rate_inverse(double rate);

// Gammatone channels: t^{order-1} e^{-2 pi b t} cos(2 pi f_c t) sampled,
// truncated, l2-normalized. Inverse channels: linear-phase FIR whose
// magnitude is the clamped complement of the peak-normalized gammatone
// response, by frequency sampling at fir_length points.
FilterBank design_bank(const FilterBankSpec& spec);

// Full convolution, delay-compensated to input length, scaled by the bank
// gain, rounded, and saturated to the signed 16-bit range.
SampleBuffer apply_channel(const FilterChannel& channel, const SampleBuffer& buffer);

// Shares the padded signal FFT across channels and caches tap FFTs per
// transform size. Outputs are bitwise identical to apply_channel.
// Safe for concurrent apply calls.
class FilterRunner {
 public:
  explicit FilterRunner(FilterBank bank);

  const FilterBank& bank() const { return bank_; }

  std::vector<SampleBuffer> apply_all(const SampleBuffer& buffer) const;
  SampleBuffer apply_one(std::size_t channel_index, const SampleBuffer& buffer) const;

 private:
  using Spectrum = std::vector<std::complex<double>>;
  std::shared_ptr<const Spectrum> tap_fft(std::size_t channel_index, std::size_t fft_size) const;

  FilterBank bank_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const Spectrum>> cache_;
};

// Bank export: (channel_index, family, center_freq) TSV plus a binary tap
// dump ("FBK1") for audit.
void export_bank_tsv(const FilterBank& bank, const std::filesystem::path& path,
                     std::span<const std::string> header_comments);
void export_bank_taps(const FilterBank& bank, const std::filesystem::path& path);

}  // namespace wavepmf
