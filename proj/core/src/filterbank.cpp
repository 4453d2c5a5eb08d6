// core/src/filterbank.cpp

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

#include "wavepmf/filterbank.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "wavepmf/errors.hpp"
#include "wavepmf/fft.hpp"
#include "wavepmf/rng.hpp"
#include "wavepmf/tsv.hpp"

namespace wavepmf {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::uint64_t kProbeSeed = 0x57415645;  // gain probe RNG seed
constexpr std::size_t kProbeLength = 65536;

void validate(const FilterBankSpec& spec) {
  if (spec.sample_rate <= 0) raise(Errc::InvalidSpec, "sample_rate must be positive");
  if (spec.n_channels_per_family < 1) raise(Errc::InvalidSpec, "need at least one channel per family");
  if (spec.order < 1) raise(Errc::InvalidSpec, "order must be >= 1");
  if (spec.fir_length < 64) raise(Errc::InvalidSpec, "fir_length must be >= 64");
  const double f_max = spec.effective_f_max();
  if (!(spec.f_min > 0.0) || !(spec.f_min < f_max))
    raise(Errc::InvalidSpec, "need 0 < f_min < f_max");
  if (f_max > spec.sample_rate / 2.0) raise(Errc::InvalidSpec, "f_max exceeds Nyquist");
}

void l2_normalize(std::vector<double>& taps) {
  double norm = 0.0;
  for (double t : taps) norm += t * t;
  norm = std::sqrt(norm);
  if (norm == 0.0) raise(Errc::InvalidSpec, "degenerate all-zero filter taps");
  for (double& t : taps) t /= norm;
}

std::vector<double> gammatone_taps(const FilterBankSpec& spec, double f_c) {
  std::vector<double> taps(static_cast<std::size_t>(spec.fir_length));
  const double b = 1.019 * erb_bandwidth(f_c);
  for (std::size_t n = 0; n < taps.size(); ++n) {
    const double t = static_cast<double>(n) / spec.sample_rate;
    taps[n] = std::pow(t, spec.order - 1) * std::exp(-kTwoPi * b * t) * std::cos(kTwoPi * f_c * t);
  }
  l2_normalize(taps);
  return taps;
}

// Linear-phase FIR by frequency sampling: desired magnitude is the clamped
// complement of the peak-normalized gammatone response at the L DFT bins
// (Nyquist bin forced to zero, as the symmetric even-length form requires).
std::vector<double> inverse_taps(const std::vector<double>& gamma_taps, int fir_length) {
  const std::size_t L = static_cast<std::size_t>(fir_length);
  std::vector<double> mag = magnitude_response(gamma_taps, L);
  double peak = 0.0;
  for (double m : mag) peak = std::max(peak, m);
  std::vector<double> want(mag.size());
  for (std::size_t k = 0; k < mag.size(); ++k) want[k] = std::max(0.0, 1.0 - mag[k] / peak);
  want.back() = 0.0;

  std::vector<double> taps(L);
  const double delay = (static_cast<double>(L) - 1.0) / 2.0;
  for (std::size_t n = 0; n < L; ++n) {
    double acc = want[0];
    for (std::size_t k = 1; k + 1 < want.size(); ++k)
      acc += 2.0 * want[k] * std::cos(kTwoPi * static_cast<double>(k) * (static_cast<double>(n) - delay) / static_cast<double>(L));
    taps[n] = acc / static_cast<double>(L);
  }
  l2_normalize(taps);
  return taps;
}

int peak_tap_index(const std::vector<double>& taps) {
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const double m = std::fabs(taps[i]);
    if (m > best_mag) {
      best_mag = m;
      best = i;
    }
  }
  return static_cast<int>(best);
}

std::vector<double> convolve_taps(const std::vector<double>& x, const std::vector<double>& taps,
                                  const std::complex<double>* tap_fft, std::size_t fft_size) {
  const std::size_t out_len = x.size() + taps.size() - 1;
  if (tap_fft == nullptr) {
    std::vector<std::complex<double>> h(fft_size);
    for (std::size_t i = 0; i < taps.size(); ++i) h[i] = {taps[i], 0.0};
    fft_inplace(h, false);
    std::vector<std::complex<double>> xs(fft_size);
    for (std::size_t i = 0; i < x.size(); ++i) xs[i] = {x[i], 0.0};
    fft_inplace(xs, false);
    for (std::size_t k = 0; k < fft_size; ++k) xs[k] *= h[k];
    fft_inplace(xs, true);
    std::vector<double> y(out_len);
    for (std::size_t i = 0; i < out_len; ++i) y[i] = xs[i].real();
    return y;
  }
  std::vector<std::complex<double>> xs(fft_size);
  for (std::size_t i = 0; i < x.size(); ++i) xs[i] = {x[i], 0.0};
  fft_inplace(xs, false);
  for (std::size_t k = 0; k < fft_size; ++k) xs[k] *= tap_fft[k];
  fft_inplace(xs, true);
  std::vector<double> y(out_len);
  for (std::size_t i = 0; i < out_len; ++i) y[i] = xs[i].real();
  return y;
}

SampleBuffer quantize_output(const std::vector<double>& y_full, const FilterChannel& channel,
                             std::size_t input_len, int sample_rate) {
  SampleBuffer out;
  out.sample_rate = sample_rate;
  out.samples.resize(input_len);
  const std::size_t delay = static_cast<std::size_t>(channel.group_delay);
  for (std::size_t i = 0; i < input_len; ++i) {
    const std::size_t j = i + delay;
    const double v = j < y_full.size() ? channel.bank_gain * y_full[j] : 0.0;
    long long q = std::llround(v);
    if (q < -32768) q = -32768;
    if (q > 32767) q = 32767;
    out.samples[i] = static_cast<std::int16_t>(q);
  }
  return out;
}

std::vector<double> widen(const SampleBuffer& buffer) {
  std::vector<double> x(buffer.samples.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(buffer.samples[i]);
  return x;
}

}  // namespace

const char* family_name(FilterFamily f) {
  return f == FilterFamily::Gammatone ? "gammatone" : "inverse_gammatone";
}

double erb_bandwidth(double freq_hz) { return 24.7 * (4.37 * freq_hz / 1000.0 + 1.0); }

double erb_rate(double freq_hz) { return 21.4 * std::log10(4.37 * freq_hz / 1000.0 + 1.0); }

double erb_rate_inverse(double rate) {
  return (std::pow(10.0, rate / 21.4) - 1.0) * 1000.0 / 4.37;
}

FilterBank design_bank(const FilterBankSpec& spec) {
  validate(spec);
  FilterBank bank;
  bank.spec = spec;

  const int n = spec.n_channels_per_family;
  const double r_lo = erb_rate(spec.f_min);
  const double r_hi = erb_rate(spec.effective_f_max());
  std::vector<double> centers(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double r = n == 1 ? 0.5 * (r_lo + r_hi)
                            : r_lo + (r_hi - r_lo) * static_cast<double>(i) / (n - 1);
    centers[static_cast<std::size_t>(i)] = erb_rate_inverse(r);
  }

  bank.channels.reserve(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    FilterChannel ch;
    ch.family = FilterFamily::Gammatone;
    ch.center_freq = centers[static_cast<std::size_t>(i)];
    ch.coefficients = gammatone_taps(spec, ch.center_freq);
    ch.channel_index = i;
    ch.group_delay = peak_tap_index(ch.coefficients);
    bank.channels.push_back(std::move(ch));
  }
  for (int i = 0; i < n; ++i) {
    FilterChannel ch;
    ch.family = FilterFamily::InverseGammatone;
    ch.center_freq = centers[static_cast<std::size_t>(i)];
    ch.coefficients = inverse_taps(bank.channels[static_cast<std::size_t>(i)].coefficients, spec.fir_length);
    ch.channel_index = n + i;
    ch.group_delay = (spec.fir_length - 1) / 2;
    bank.channels.push_back(std::move(ch));
  }

  // Bank-global gain: a full-scale white-noise probe must not clip on any
  // channel. Relative channel energies are preserved by sharing one gain.
  Rng rng(kProbeSeed);
  std::vector<double> probe(kProbeLength);
  for (double& s : probe)
    s = static_cast<double>(static_cast<std::int64_t>(rng.bounded(65536)) - 32768);
  double peak = 0.0;
  const std::size_t fft_size = next_pow2(kProbeLength + static_cast<std::size_t>(spec.fir_length) - 1);
  for (const FilterChannel& ch : bank.channels) {
    const std::vector<double> y = convolve_taps(probe, ch.coefficients, nullptr, fft_size);
    for (double v : y) peak = std::max(peak, std::fabs(v));
  }
  bank.gain = peak <= 32767.0 ? 1.0 : 32767.0 / peak;
  for (FilterChannel& ch : bank.channels) ch.bank_gain = bank.gain;
  return bank;
}

SampleBuffer apply_channel(const FilterChannel& channel, const SampleBuffer& buffer) {
  if (buffer.samples.empty()) raise(Errc::EmptyBuffer, "cannot filter an empty buffer");
  const std::vector<double> x = widen(buffer);
  const std::size_t fft_size = next_pow2(x.size() + channel.coefficients.size() - 1);
  const std::vector<double> y = convolve_taps(x, channel.coefficients, nullptr, fft_size);
  return quantize_output(y, channel, x.size(), buffer.sample_rate);
}

FilterRunner::FilterRunner(FilterBank bank) : bank_(std::move(bank)) {}

std::shared_ptr<const FilterRunner::Spectrum> FilterRunner::tap_fft(std::size_t channel_index,
                                                                    std::size_t fft_size) const {
  const auto key = std::make_pair(channel_index, fft_size);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  auto spec = std::make_shared<Spectrum>(fft_size);
  const auto& taps = bank_.channels[channel_index].coefficients;
  for (std::size_t i = 0; i < taps.size(); ++i) (*spec)[i] = {taps[i], 0.0};
  fft_inplace(*spec, false);
  cache_.emplace(key, spec);
  return spec;
}

SampleBuffer FilterRunner::apply_one(std::size_t channel_index, const SampleBuffer& buffer) const {
  if (buffer.samples.empty()) raise(Errc::EmptyBuffer, "cannot filter an empty buffer");
  const FilterChannel& ch = bank_.channels.at(channel_index);
  const std::vector<double> x = widen(buffer);
  const std::size_t fft_size = next_pow2(x.size() + ch.coefficients.size() - 1);
  const auto h = tap_fft(channel_index, fft_size);
  const std::vector<double> y = convolve_taps(x, ch.coefficients, h->data(), fft_size);
  return quantize_output(y, ch, x.size(), buffer.sample_rate);
}

std::vector<SampleBuffer> FilterRunner::apply_all(const SampleBuffer& buffer) const {
  if (buffer.samples.empty()) raise(Errc::EmptyBuffer, "cannot filter an empty buffer");
  const std::vector<double> x = widen(buffer);
  const std::size_t fir_len = bank_.channels.empty() ? 1 : bank_.channels.front().coefficients.size();
  const std::size_t fft_size = next_pow2(x.size() + fir_len - 1);
  std::vector<std::complex<double>> xs(fft_size);
  for (std::size_t i = 0; i < x.size(); ++i) xs[i] = {x[i], 0.0};
  fft_inplace(xs, false);

  std::vector<SampleBuffer> out;
  out.reserve(bank_.channels.size());
  for (std::size_t c = 0; c < bank_.channels.size(); ++c) {
    const auto h = tap_fft(c, fft_size);
    std::vector<std::complex<double>> prod(fft_size);
    for (std::size_t k = 0; k < fft_size; ++k) prod[k] = xs[k] * (*h)[k];
    fft_inplace(prod, true);
    const std::size_t out_len = x.size() + bank_.channels[c].coefficients.size() - 1;
    std::vector<double> y(out_len);
    for (std::size_t i = 0; i < out_len; ++i) y[i] = prod[i].real();
    out.push_back(quantize_output(y, bank_.channels[c], x.size(), buffer.sample_rate));
  }
  return out;
}

void export_bank_tsv(const FilterBank& bank, const std::filesystem::path& path,
                     std::span<const std::string> header_comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  for (const std::string& line : header_comments) out << "# " << line << "\n";
  out << "channel_index\tfamily\tcenter_freq\n";
  for (const FilterChannel& ch : bank.channels)
    out << ch.channel_index << '\t' << family_name(ch.family) << '\t'
        << format_double(ch.center_freq) << '\n';
  if (!out) raise(Errc::IoError, "short write: " + path.string());
}

void export_bank_taps(const FilterBank& bank, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  auto put_u32 = [&](std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                 static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out.write(b, 4);
  };
  auto put_f64 = [&](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    out.write(b, 8);
  };
  out.write("FBK1", 4);
  put_u32(static_cast<std::uint32_t>(bank.channels.size()));
  put_f64(bank.gain);
  for (const FilterChannel& ch : bank.channels) {
    put_u32(static_cast<std::uint32_t>(ch.channel_index));
    put_u32(ch.family == FilterFamily::Gammatone ? 0u : 1u);
    put_f64(ch.center_freq);
    put_u32(static_cast<std::uint32_t>(ch.group_delay));
    put_u32(static_cast<std::uint32_t>(ch.coefficients.size()));
    for (double t : ch.coefficients) put_f64(t);
  }
  if (!out) raise(Errc::IoError, "short write: " + path.string());
}

}  // namespace wavepmf
