// core/include/wavepmf/corpus.hpp

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
#include <optional>
#include <string>
#include <vector>

#include "wavepmf/audio.hpp"

namespace wavepmf {

enum class Label { BonaFide, Spoof };
enum class Subset { Train, Dev, Eval };
enum class Gender { Male, Female, Unknown };

const char* label_name(Label l);
const char* subset_name(Subset s);
const char* gender_name(Gender g);

// One corpus trial. codec is empty for uncompressed ("none") trials and
// holds the codec name otherwise; attack_id is empty for bona fide trials.
struct UtteranceRecord {
  std::string utt_id;
  std::filesystem::path audio_path;
  Subset subset = Subset::Train;
  Label label = Label::BonaFide;
  std::string speaker_id;
  Gender gender = Gender::Unknown;
  std::string codec;      // empty == no codec
  std::string attack_id;  // empty == none (bona fide)

  bool has_codec() const { return !codec.empty(); }
};

struct CorpusManifest {
  std::string corpus_name;
  int sample_rate = 16000;
  std::vector<UtteranceRecord> records;
};

// Optional criteria; a record matches when every set criterion holds.
// codec_none=true selects only uncompressed trials; codec_name selects one
// specific codec.
struct RecordFilter {
  std::optional<Subset> subset;
  std::optional<Label> label;
  std::optional<Gender> gender;
  std::optional<bool> codec_none;
  std::optional<std::string> codec_name;

  bool matches(const UtteranceRecord& r) const;
};

// Manifest TSV: 8 tab-separated columns
//   utt_id  audio_path  subset(train|dev|eval)  label(bonafide|spoof)
//   speaker_id  gender(m|f|u)  codec(none|<name>)  attack_id(-|A<nn>)
// Lines starting with '#' are comments; "#%corpus_name <s>" and
// "#%sample_rate <n>" directives populate the manifest header fields.
// Relative audio paths are resolved against the manifest's directory.
CorpusManifest parse_manifest(const std::filesystem::path& path);

std::vector<UtteranceRecord> select(const CorpusManifest& manifest, const RecordFilter& filter);

std::size_t count_matching(const CorpusManifest& manifest, const RecordFilter& filter);

// Decodes a record's audio and enforces the manifest sample rate
// (a mismatch is an error, never a resample).
SampleBuffer decode_record(const CorpusManifest& manifest, const UtteranceRecord& record);

}  // namespace wavepmf
