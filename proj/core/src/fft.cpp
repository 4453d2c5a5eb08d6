// core/src/fft.cpp

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

#include "wavepmf/fft.hpp"

#include <cmath>

namespace wavepmf {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  // bit reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  // one twiddle table for the largest stage, strided for smaller ones
  std::vector<std::complex<double>> twiddle(n / 2);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n / 2; ++k) {
    double ang = sign * kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    twiddle[k] = {std::cos(ang), std::sin(ang)};
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * twiddle[k * stride];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv_n;
  }
}

std::vector<double> convolve_full(std::span<const double> x, std::span<const double> h) {
  if (x.empty() || h.empty()) return {};
  const std::size_t out_len = x.size() + h.size() - 1;
  // Direct form is cheaper (and exact) for short inputs.
  if (static_cast<double>(x.size()) * static_cast<double>(h.size()) <= 262144.0) {
    std::vector<double> y(out_len, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      for (std::size_t j = 0; j < h.size(); ++j) y[i + j] += xi * h[j];
    }
    return y;
  }
  const std::size_t n = next_pow2(out_len);
  // pack both real sequences into one complex FFT
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = {x[i], 0.0};
  for (std::size_t j = 0; j < h.size(); ++j) buf[j] += std::complex<double>(0.0, h[j]);
  fft_inplace(buf, false);
  std::vector<std::complex<double>> prod(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t kc = (n - k) & (n - 1);
    const std::complex<double> fk = buf[k];
    const std::complex<double> fkc = std::conj(buf[kc]);
    const std::complex<double> xk = 0.5 * (fk + fkc);
    const std::complex<double> hk = std::complex<double>(0.0, -0.5) * (fk - fkc);
    prod[k] = xk * hk;
  }
  fft_inplace(prod, true);
  std::vector<double> y(out_len);
  for (std::size_t i = 0; i < out_len; ++i) y[i] = prod[i].real();
  return y;
}

std::vector<double> magnitude_response(std::span<const double> taps, std::size_t n_points) {
  std::vector<std::complex<double>> buf(n_points);
  const std::size_t m = taps.size() < n_points ? taps.size() : n_points;
  for (std::size_t i = 0; i < m; ++i) buf[i] = {taps[i], 0.0};
  fft_inplace(buf, false);
  std::vector<double> mag(n_points / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(buf[k]);
  return mag;
}

}  // namespace wavepmf
