// core/include/wavepmf/embedding.hpp

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

#include <filesystem>
#include <string>
#include <vector>

#include "wavepmf/corpus.hpp"
#include "wavepmf/filterbank.hpp"
#include "wavepmf/measures.hpp"
#include "wavepmf/pmf.hpp"

namespace wavepmf {

// Per-channel class reference PMFs estimated from a training selection.
// references[class_rank][channel_index] is the raw (unsmoothed) pooled PMF
// of the filtered training utterances; smoothing happens inside the
// measures, driven by `epsilon`.
struct ReferenceBank {
  FilterBank bank;
  double epsilon = 1e-10;
  std::vector<Label> reference_labels;  // {BonaFide} by default; {BonaFide,Spoof} doubles the dim
  std::vector<std::vector<Pmf>> references;
  std::vector<MeasureId> roster;  // measure battery, fixed order

  std::size_t dimension() const {
    return reference_labels.size() * bank.channels.size() * roster.size();
  }
};

struct EmbeddingVector {
  std::string utt_id;
  std::vector<double> values;  // index = (class_rank * n_channels + channel) * |roster| + measure_rank
};

// Builds class references over every record matching base_filter with its
// label overridden per reference class. Pooled-sample convention.
ReferenceBank build_references(const CorpusManifest& manifest, const RecordFilter& base_filter,
                               const FilterBankSpec& spec, double epsilon,
                               std::vector<MeasureId> roster = {kAllMeasures.begin(), kAllMeasures.end()},
                               std::vector<Label> reference_labels = {Label::BonaFide},
                               unsigned workers = 1);

// Owns the filter runner so repeated embeds share tap FFTs. Thread-safe.
class Embedder {
 public:
  explicit Embedder(ReferenceBank bank);

  const ReferenceBank& reference_bank() const { return bank_; }

  // 20 channels x 8 measures (x reference classes) similarity coordinates.
  std::vector<double> embed(const SampleBuffer& buffer) const;

  // One vector per selected record, manifest order, deterministic for any
  // worker count.
  std::vector<EmbeddingVector> embed_corpus(const CorpusManifest& manifest,
                                            const RecordFilter& filter,
                                            unsigned workers = 1) const;

 private:
  ReferenceBank bank_;
  FilterRunner runner_;
};

void export_embeddings_tsv(const std::vector<EmbeddingVector>& vectors,
                           const std::vector<UtteranceRecord>& records,
                           const std::filesystem::path& path,
                           std::span<const std::string> header_comments);

// Binary container ("REF1") with the filter bank, epsilon, roster, and the
// per-class per-channel reference PMFs.
void save_reference_bank(const ReferenceBank& bank, const std::filesystem::path& path);
ReferenceBank load_reference_bank(const std::filesystem::path& path);
std::string reference_bank_to_bytes(const ReferenceBank& bank);
ReferenceBank reference_bank_from_bytes(std::string_view bytes);

}  // namespace wavepmf
