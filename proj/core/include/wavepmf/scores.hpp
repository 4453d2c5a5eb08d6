// core/include/wavepmf/scores.hpp

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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wavepmf/corpus.hpp"

namespace wavepmf {

// Externally produced countermeasure score; higher means more bona fide
// (a polarity flag flips systems with the opposite convention).
struct ScoreRecord {
  std::string utt_id;
  double score = 0.0;
};

// Score file: TSV with columns utt_id, score; '#' comments allowed.
std::vector<ScoreRecord> read_score_file(const std::filesystem::path& path);

// EER by threshold sweep over all candidate thresholds (midpoints between
// adjacent distinct pooled scores, plus sentinels beyond both ends standing
// in for +-inf). miss(t) = fraction of bona scores < t; fa(t) = fraction of
// spoof scores >= t; the crossing is linearly interpolated between the
// bracketing operating points. Returns {eer, threshold}.
std::pair<double, double> compute_eer(std::span<const double> bona_scores,
                                      std::span<const double> spoof_scores);

// Fraction of scores strictly below the threshold.
double miss_rate(std::span<const double> bona_scores, double threshold);

// Percentile bootstrap over binary outcomes; replica r draws its generator
// from (seed, r), so the replicas are schedule-independent.
std::pair<double, double> bootstrap_ci(std::span<const int> outcomes, int n_bootstrap,
                                       double alpha_percent, std::uint64_t seed,
                                       unsigned workers = 1);

struct EvalConfig {
  int n_bootstrap = 1000;
  double alpha_percent = 5.0;
  std::uint64_t seed = 0;
  bool higher_is_bonafide = true;
  unsigned workers = 1;
};

// One scored selection: scores joined against `manifest`, reported under
// (database, subset).
struct ScoreSet {
  std::string database;
  Subset subset = Subset::Eval;
  const CorpusManifest* manifest = nullptr;
  std::vector<ScoreRecord> scores;
};

struct EvalRow {
  std::string database;
  std::string subset;
  std::string gender;  // "m", "f", "u", or "all"
  std::size_t n_trials = 0;
  std::size_t n_missed = 0;
  double miss_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct EvalReport {
  double threshold = 0.0;
  double eer_dev = 0.0;
  int n_bootstrap = 0;
  double alpha_percent = 0.0;
  std::uint64_t seed = 0;
  std::vector<EvalRow> rows;
};

// Threshold from the EER of the dev set (both classes), then stratified
// bona fide miss rates with bootstrap CIs per target group: one row per
// gender present plus an "all" row. Score utt_ids that do not join to the
// manifest raise JoinFailure; spoof-labelled joins are ignored (the report
// is a bona fide miss rate).
EvalReport evaluate(const ScoreSet& dev, std::span<const ScoreSet> targets,
                    const EvalConfig& config);

// Table-4-shaped TSV plus a JSON variant carrying config and seed.
void export_eval_tsv(const EvalReport& report, const std::filesystem::path& path,
                     std::span<const std::string> header_comments);
void export_eval_json(const EvalReport& report, const std::filesystem::path& path,
                      const std::map<std::string, std::string>& provenance);

}  // namespace wavepmf
