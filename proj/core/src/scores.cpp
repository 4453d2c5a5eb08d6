// core/src/scores.cpp

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

#include "wavepmf/scores.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "wavepmf/errors.hpp"
#include "wavepmf/parallel.hpp"
#include "wavepmf/rng.hpp"
#include "wavepmf/tsv.hpp"

namespace wavepmf {

std::vector<ScoreRecord> read_score_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open score file: " + path.string());
  std::vector<ScoreRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split_tsv(line);
    if (cols.size() != 2)
      raise(Errc::MalformedLine, path.string() + ":" + std::to_string(line_no) +
                                     ": expected 2 columns (utt_id, score)");
    auto score = parse_double(cols[1]);
    if (!score)
      raise(Errc::MalformedLine,
            path.string() + ":" + std::to_string(line_no) + ": unparsable score");
    out.push_back({std::string(cols[0]), *score});
  }
  return out;
}

namespace {

double frac_below(const std::vector<double>& sorted, double t) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

double frac_at_or_above(const std::vector<double>& sorted, double t) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
  return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// type-7 quantile (linear interpolation between order statistics)
double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) return sorted.front();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::pair<double, double> compute_eer(std::span<const double> bona_scores,
                                      std::span<const double> spoof_scores) {
  if (bona_scores.empty() || spoof_scores.empty())
    raise(Errc::EmptyScores, "both score lists must be non-empty");

  std::vector<double> bona(bona_scores.begin(), bona_scores.end());
  std::vector<double> spoof(spoof_scores.begin(), spoof_scores.end());
  std::sort(bona.begin(), bona.end());
  std::sort(spoof.begin(), spoof.end());

  std::vector<double> pooled;
  pooled.reserve(bona.size() + spoof.size());
  pooled.insert(pooled.end(), bona.begin(), bona.end());
  pooled.insert(pooled.end(), spoof.begin(), spoof.end());
  std::sort(pooled.begin(), pooled.end());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  // Sentinels one unit past the data range behave exactly like +-inf for
  // the two step functions.
  std::vector<double> candidates;
  candidates.reserve(pooled.size() + 1);
  candidates.push_back(pooled.front() - 1.0);
  for (std::size_t i = 0; i + 1 < pooled.size(); ++i)
    candidates.push_back(0.5 * (pooled[i] + pooled[i + 1]));
  candidates.push_back(pooled.back() + 1.0);

  // miss - fa is non-decreasing: -1 at the low sentinel, +1 at the high one.
  double prev_miss = 0.0, prev_fa = 1.0, prev_t = candidates.front();
  for (double t : candidates) {
    const double miss = frac_below(bona, t);
    const double fa = frac_at_or_above(spoof, t);
    const double diff = miss - fa;
    if (diff == 0.0) return {miss, t};
    if (diff > 0.0) {
      const double denom = (miss - prev_miss) - (fa - prev_fa);
      const double s = denom != 0.0 ? (prev_fa - prev_miss) / denom : 0.5;
      const double eer = prev_miss + s * (miss - prev_miss);
      return {eer, 0.5 * (prev_t + t)};
    }
    prev_miss = miss;
    prev_fa = fa;
    prev_t = t;
  }
  return {1.0, candidates.back()};  // unreachable: diff ends at +1
}

double miss_rate(std::span<const double> bona_scores, double threshold) {
  if (bona_scores.empty()) raise(Errc::EmptyScores, "empty score list");
  std::size_t below = 0;
  for (double s : bona_scores)
    if (s < threshold) ++below;
  return static_cast<double>(below) / static_cast<double>(bona_scores.size());
}

std::pair<double, double> bootstrap_ci(std::span<const int> outcomes, int n_bootstrap,
                                       double alpha_percent, std::uint64_t seed,
                                       unsigned workers) {
  if (outcomes.empty()) raise(Errc::EmptyOutcomes, "no outcomes to resample");
  if (n_bootstrap < 1) raise(Errc::EmptyOutcomes, "n_bootstrap must be >= 1");
  if (!(alpha_percent > 0.0 && alpha_percent < 100.0))
    raise(Errc::EmptyOutcomes, "alpha_percent must be in (0, 100)");

  const std::size_t n = outcomes.size();
  std::vector<double> means(static_cast<std::size_t>(n_bootstrap));
  parallel_for(means.size(), workers, [&](std::size_t r) {
    Rng rng = Rng::derive(seed, r);
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += static_cast<std::uint64_t>(outcomes[rng.bounded(n)]);
    means[r] = static_cast<double>(hits) / static_cast<double>(n);
  });
  std::sort(means.begin(), means.end());
  const double q = alpha_percent / 200.0;
  return {quantile_sorted(means, q), quantile_sorted(means, 1.0 - q)};
}

EvalReport evaluate(const ScoreSet& dev, std::span<const ScoreSet> targets,
                    const EvalConfig& config) {
  if (dev.manifest == nullptr) raise(Errc::JoinFailure, "dev score set has no manifest");
  const double polarity = config.higher_is_bonafide ? 1.0 : -1.0;

  auto build_index = [](const CorpusManifest& m) {
    std::unordered_map<std::string, const UtteranceRecord*> idx;
    idx.reserve(m.records.size());
    for (const UtteranceRecord& r : m.records) idx.emplace(r.utt_id, &r);
    return idx;
  };

  // dev: both classes join; EER threshold
  const auto dev_index = build_index(*dev.manifest);
  std::vector<double> dev_bona, dev_spoof;
  for (const ScoreRecord& s : dev.scores) {
    const auto it = dev_index.find(s.utt_id);
    if (it == dev_index.end())
      raise(Errc::JoinFailure, "dev score utt_id '" + s.utt_id + "' not in manifest '" +
                                   dev.manifest->corpus_name + "'");
    if (it->second->label == Label::BonaFide)
      dev_bona.push_back(polarity * s.score);
    else
      dev_spoof.push_back(polarity * s.score);
  }
  if (dev_bona.empty() || dev_spoof.empty())
    raise(Errc::EmptyScores, "dev selection must contain both classes");
  const auto [eer, threshold] = compute_eer(dev_bona, dev_spoof);

  EvalReport report;
  report.threshold = threshold;
  report.eer_dev = eer;
  report.n_bootstrap = config.n_bootstrap;
  report.alpha_percent = config.alpha_percent;
  report.seed = config.seed;

  for (const ScoreSet& target : targets) {
    if (target.manifest == nullptr)
      raise(Errc::JoinFailure, "target score set '" + target.database + "' has no manifest");
    const auto index = build_index(*target.manifest);

    // bona fide joins only, sorted by utt_id for row-order invariance
    std::vector<std::pair<std::string, std::pair<double, Gender>>> joined;
    for (const ScoreRecord& s : target.scores) {
      const auto it = index.find(s.utt_id);
      if (it == index.end())
        raise(Errc::JoinFailure, "score utt_id '" + s.utt_id + "' not in manifest '" +
                                     target.manifest->corpus_name + "'");
      const UtteranceRecord& r = *it->second;
      if (r.label != Label::BonaFide) continue;
      if (r.subset != target.subset) continue;
      joined.emplace_back(s.utt_id, std::make_pair(polarity * s.score, r.gender));
    }
    if (joined.empty())
      raise(Errc::EmptyGroup, "no bona fide trials joined for '" + target.database + "/" +
                                  subset_name(target.subset) + "'");
    std::sort(joined.begin(), joined.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    auto emit_row = [&](const char* gender_tag, const std::vector<int>& outcomes) {
      if (outcomes.empty()) return;
      EvalRow row;
      row.database = target.database;
      row.subset = subset_name(target.subset);
      row.gender = gender_tag;
      row.n_trials = outcomes.size();
      for (int o : outcomes) row.n_missed += static_cast<std::size_t>(o);
      row.miss_rate = static_cast<double>(row.n_missed) / static_cast<double>(row.n_trials);
      const std::uint64_t stream =
          fnv1a64(row.database + "\x1f" + row.subset + "\x1f" + row.gender);
      const auto [lo, hi] = bootstrap_ci(outcomes, config.n_bootstrap, config.alpha_percent,
                                         config.seed ^ stream, config.workers);
      row.ci_low = lo;
      row.ci_high = hi;
      report.rows.push_back(std::move(row));
    };

    std::vector<int> all, male, female, unknown;
    for (const auto& [id, sg] : joined) {
      const int missed = sg.first < threshold ? 1 : 0;
      all.push_back(missed);
      switch (sg.second) {
        case Gender::Male: male.push_back(missed); break;
        case Gender::Female: female.push_back(missed); break;
        case Gender::Unknown: unknown.push_back(missed); break;
      }
    }
    emit_row("m", male);
    emit_row("f", female);
    emit_row("u", unknown);
    emit_row("all", all);
  }
  return report;
}

void export_eval_tsv(const EvalReport& report, const std::filesystem::path& path,
                     std::span<const std::string> header_comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  for (const std::string& line : header_comments) out << "# " << line << "\n";
  out << "# threshold=" << format_double(report.threshold)
      << " eer_dev=" << format_double(report.eer_dev) << " n_bootstrap=" << report.n_bootstrap
      << " alpha=" << format_double(report.alpha_percent) << " seed=" << report.seed << "\n";
  out << "database\tsubset\tgender\tn_trials\tmiss_rate_percent\tci_low_percent\tci_high_percent\n";
  for (const EvalRow& r : report.rows)
    out << r.database << '\t' << r.subset << '\t' << r.gender << '\t' << r.n_trials << '\t'
        << format_double(100.0 * r.miss_rate) << '\t' << format_double(100.0 * r.ci_low) << '\t'
        << format_double(100.0 * r.ci_high) << '\n';
  if (!out) raise(Errc::IoError, "short write: " + path.string());
}

void export_eval_json(const EvalReport& report, const std::filesystem::path& path,
                      const std::map<std::string, std::string>& provenance) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : provenance) j[k] = v;
  j["threshold"] = report.threshold;
  j["eer_dev"] = report.eer_dev;
  j["n_bootstrap"] = report.n_bootstrap;
  j["alpha_percent"] = report.alpha_percent;
  j["seed"] = report.seed;
  j["rows"] = nlohmann::ordered_json::array();
  for (const EvalRow& r : report.rows) {
    j["rows"].push_back({{"database", r.database},
                         {"subset", r.subset},
                         {"gender", r.gender},
                         {"n_trials", r.n_trials},
                         {"n_missed", r.n_missed},
                         {"miss_rate", r.miss_rate},
                         {"ci_low", r.ci_low},
                         {"ci_high", r.ci_high}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) raise(Errc::IoError, "short write: " + path.string());
}

}  // namespace wavepmf
