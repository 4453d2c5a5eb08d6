// core/include/wavepmf/pipeline.hpp

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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavepmf/cache.hpp"
#include "wavepmf/corpus.hpp"
#include "wavepmf/embedding.hpp"
#include "wavepmf/filterbank.hpp"
#include "wavepmf/measures.hpp"
#include "wavepmf/pmf.hpp"
#include "wavepmf/scores.hpp"
#include "wavepmf/umap.hpp"

namespace wavepmf {

// A selection names a corpus plus record criteria:
//   <corpus_key>/<token>/...  with tokens from
//   train|dev|eval, bonafide|spoof, male|female, nocodec, codec=<name>
struct SelectionSpec {
  std::string corpus_key;
  RecordFilter filter;
  std::string tag;      // filesystem-safe identifier
  std::string display;  // as written in the config
};

struct CompareSpec {
  SelectionSpec a;
  SelectionSpec b;
};

struct EvalTargetSpec {
  std::string corpus_key;
  Subset subset = Subset::Eval;
  std::filesystem::path scores_path;
};

struct CorpusRef {
  std::filesystem::path manifest_path;
  std::string display_name;  // empty: use the manifest's corpus_name
};

// Parsed "key = value" run configuration. All randomness seeds are explicit
// fields; nothing reads ambient entropy.
struct RunConfig {
  std::filesystem::path workspace;
  double epsilon = 1e-10;
  SymKlConvention kl_convention = SymKlConvention::Mean;
  PmfWeighting weighting = PmfWeighting::PooledSamples;
  unsigned workers = 1;
  bool all_measures = false;
  bool use_pca_fallback = false;

  std::map<std::string, CorpusRef> corpora;

  FilterBankSpec bank;
  std::vector<MeasureId> roster = {kAllMeasures.begin(), kAllMeasures.end()};
  std::vector<Label> reference_classes = {Label::BonaFide};

  UmapConfig umap;

  std::vector<SelectionSpec> pmf_selections;
  std::vector<CompareSpec> comparisons;
  std::optional<SelectionSpec> fit_selection;
  std::vector<SelectionSpec> project_selections;

  std::optional<EvalTargetSpec> eval_dev;
  std::vector<EvalTargetSpec> eval_targets;
  EvalConfig eval;

  // Deterministic serialization used for the provenance config hash.
  std::string canonical_string() const;
};

RunConfig parse_run_config(const std::filesystem::path& path);
RunConfig parse_run_config_text(std::string_view text, const std::filesystem::path& base_dir);

struct RunStats {
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::vector<std::filesystem::path> outputs;

  void merge(const RunStats& other);
};

// Orchestrates the full assessment run: loads manifests once, validates
// declared selections, and emits report files under <workspace>/reports
// with a content-addressed cache under <workspace>/cache.
class Pipeline {
 public:
  explicit Pipeline(RunConfig config);

  const RunConfig& config() const { return config_; }
  const std::string& config_hash() const { return config_hash_; }

  RunStats cmd_pmf();
  RunStats cmd_compare();
  RunStats cmd_embed_project();
  RunStats cmd_eval();
  RunStats report_all();

 private:
  const CorpusManifest& manifest(const std::string& corpus_key) const;
  const std::string& manifest_hash(const std::string& corpus_key) const;
  std::string corpus_display(const std::string& corpus_key) const;
  Pmf selection_pmf(const SelectionSpec& sel, double epsilon, RunStats& stats);
  ReferenceBank fit_reference_bank(RunStats& stats);
  std::vector<EmbeddingVector> selection_embeddings(const SelectionSpec& sel,
                                                    const Embedder& embedder,
                                                    const std::string& bank_key, RunStats& stats);
  std::vector<std::string> provenance_header() const;
  void validate_declared_selections() const;

  RunConfig config_;
  std::string config_hash_;
  ContentCache cache_;
  std::filesystem::path reports_dir_;
  std::map<std::string, CorpusManifest> manifests_;
  std::map<std::string, std::string> manifest_hashes_;
};

}  // namespace wavepmf
