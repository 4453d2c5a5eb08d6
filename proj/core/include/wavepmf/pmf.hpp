// core/include/wavepmf/pmf.hpp

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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wavepmf/audio.hpp"
#include "wavepmf/corpus.hpp"

namespace wavepmf {

// Amplitude histogram over the full signed 16-bit range: bin i holds the
// count of samples equal to i - 32768. Counts are 64-bit; a full ASVspoof5
// evaluation set exceeds 10^10 samples.
struct Histogram {
  static constexpr std::size_t kBins = 65536;
  static constexpr int kOffset = 32768;

  std::vector<std::uint64_t> counts;  // size kBins
  std::uint64_t total = 0;

  Histogram() : counts(kBins, 0) {}

  static constexpr std::size_t bin_of(int amplitude) {
    return static_cast<std::size_t>(amplitude + kOffset);
  }
  static constexpr int amplitude_of(std::size_t bin) {
    return static_cast<int>(bin) - kOffset;
  }
};

// Normalized (optionally additively smoothed) form of a Histogram.
struct Pmf {
  std::vector<double> probs;      // size kBins in production; tests use fewer
  double smoothing_epsilon = 0.0;  // 0 if unsmoothed
};

Histogram histogram_of(const SampleBuffer& buffer);

// Element-wise count sum; exact in integer arithmetic, so merging is
// associative and commutative.
Histogram merge(const Histogram& a, const Histogram& b);

// probs[i] = (counts[i] + epsilon) / (total + n_bins * epsilon).
Pmf normalize(const Histogram& h, double epsilon);

// Additive re-smoothing of an existing PMF: (p + eps) / (1 + n * eps).
Pmf smooth(const Pmf& p, double epsilon);

// Cumulative sums in bin order; last entry is 1 within 1e-12.
std::vector<double> cdf_of(const Pmf& p);

double kahan_sum(std::span<const double> values);

// How a multi-utterance class PMF is aggregated. Pooled raw samples is the
// default (equivalent to one long waveform; longer files weigh more); the
// per-utterance mean exists for sensitivity checks.
enum class PmfWeighting { PooledSamples, PerUtteranceMean };

// Class-level histogram over every record matching the filter.
Histogram class_histogram(const CorpusManifest& manifest, const RecordFilter& filter,
                          unsigned workers = 1);

// select -> decode -> histogram -> merge-all -> normalize.
Pmf class_pmf(const CorpusManifest& manifest, const RecordFilter& filter, double epsilon,
              PmfWeighting weighting = PmfWeighting::PooledSamples, unsigned workers = 1);

// --- serialization (External Interfaces) ---------------------------------
// Binary container: magic "PMF1", u32 bin count, f64 epsilon,
// then bin-count little-endian doubles.
void save_pmf(const Pmf& p, const std::filesystem::path& path);
Pmf load_pmf(const std::filesystem::path& path);
std::string pmf_to_bytes(const Pmf& p);
Pmf pmf_from_bytes(std::string_view bytes);

// Sparse TSV export: header comments, then (bin_index, amplitude, prob)
// rows for nonzero bins only.
void export_pmf_tsv(const Pmf& p, const std::filesystem::path& path,
                    std::span<const std::string> header_comments);

}  // namespace wavepmf
