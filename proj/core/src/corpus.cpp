// core/src/corpus.cpp

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

#include "wavepmf/corpus.hpp"

#include <fstream>
#include <unordered_set>

#include "wavepmf/errors.hpp"
#include "wavepmf/tsv.hpp"

namespace wavepmf {

const char* label_name(Label l) { return l == Label::BonaFide ? "bonafide" : "spoof"; }

const char* subset_name(Subset s) {
  switch (s) {
    case Subset::Train: return "train";
    case Subset::Dev: return "dev";
    case Subset::Eval: return "eval";
  }
  return "?";
}

const char* gender_name(Gender g) {
  switch (g) {
    case Gender::Male: return "m";
    case Gender::Female: return "f";
    case Gender::Unknown: return "u";
  }
  return "?";
}

bool RecordFilter::matches(const UtteranceRecord& r) const {
  if (subset && r.subset != *subset) return false;
  if (label && r.label != *label) return false;
  if (gender && r.gender != *gender) return false;
  if (codec_none && *codec_none != r.codec.empty()) return false;
  if (codec_name && r.codec != *codec_name) return false;
  return true;
}

namespace {

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line_no,
                            const std::string& reason) {
  raise(Errc::MalformedLine, path.string() + ":" + std::to_string(line_no) + ": " + reason);
}

Subset parse_subset(std::string_view tok, const std::filesystem::path& path, std::size_t line_no) {
  if (tok == "train") return Subset::Train;
  if (tok == "dev") return Subset::Dev;
  if (tok == "eval") return Subset::Eval;
  raise(Errc::UnknownToken, path.string() + ":" + std::to_string(line_no) +
                                ": unknown subset token '" + std::string(tok) + "'");
}

Label parse_label(std::string_view tok, const std::filesystem::path& path, std::size_t line_no) {
  if (tok == "bonafide") return Label::BonaFide;
  if (tok == "spoof") return Label::Spoof;
  raise(Errc::UnknownToken, path.string() + ":" + std::to_string(line_no) +
                                ": unknown label token '" + std::string(tok) + "'");
}

Gender parse_gender(std::string_view tok, const std::filesystem::path& path, std::size_t line_no) {
  if (tok == "m") return Gender::Male;
  if (tok == "f") return Gender::Female;
  if (tok == "u") return Gender::Unknown;
  raise(Errc::UnknownToken, path.string() + ":" + std::to_string(line_no) +
                                ": unknown gender token '" + std::string(tok) + "'");
}

}  // namespace

CorpusManifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open manifest: " + path.string());

  CorpusManifest m;
  m.corpus_name = path.stem().string();
  const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";

  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      // "#%key value" directive comments carry manifest-level metadata.
      if (line.size() > 2 && line[1] == '%') {
        std::string_view body = trim(std::string_view(line).substr(2));
        std::size_t sp = body.find(' ');
        if (sp == std::string_view::npos) continue;
        std::string_view key = body.substr(0, sp);
        std::string_view value = trim(body.substr(sp + 1));
        if (key == "corpus_name") {
          m.corpus_name = std::string(value);
        } else if (key == "sample_rate") {
          auto v = parse_int(value);
          if (!v || *v <= 0) malformed(path, line_no, "bad sample_rate directive");
          m.sample_rate = static_cast<int>(*v);
        }
      }
      continue;
    }

    const std::vector<std::string_view> cols = split_tsv(line);
    if (cols.size() != 8)
      malformed(path, line_no,
                "expected 8 tab-separated columns, got " + std::to_string(cols.size()));

    UtteranceRecord r;
    r.utt_id = std::string(cols[0]);
    if (r.utt_id.empty()) malformed(path, line_no, "empty utt_id");
    if (!seen_ids.insert(r.utt_id).second)
      raise(Errc::DuplicateUttId,
            path.string() + ":" + std::to_string(line_no) + ": duplicate utt_id '" + r.utt_id + "'");

    if (cols[1].empty()) malformed(path, line_no, "empty audio_path");
    const std::filesystem::path audio{std::string(cols[1])};
    r.audio_path = audio.is_absolute() ? audio : base / audio;
    r.subset = parse_subset(cols[2], path, line_no);
    r.label = parse_label(cols[3], path, line_no);
    r.speaker_id = std::string(cols[4]);
    r.gender = parse_gender(cols[5], path, line_no);
    if (cols[6].empty()) malformed(path, line_no, "empty codec column (use 'none')");
    if (cols[6] != "none") r.codec = std::string(cols[6]);
    if (cols[7] != "-") r.attack_id = std::string(cols[7]);
    if (r.label == Label::BonaFide && !r.attack_id.empty())
      malformed(path, line_no, "bona fide record carries attack_id '" + r.attack_id + "'");

    m.records.push_back(std::move(r));
  }
  return m;
}

std::vector<UtteranceRecord> select(const CorpusManifest& manifest, const RecordFilter& filter) {
  std::vector<UtteranceRecord> out;
  for (const UtteranceRecord& r : manifest.records)
    if (filter.matches(r)) out.push_back(r);
  return out;
}

std::size_t count_matching(const CorpusManifest& manifest, const RecordFilter& filter) {
  std::size_t n = 0;
  for (const UtteranceRecord& r : manifest.records)
    if (filter.matches(r)) ++n;
  return n;
}

SampleBuffer decode_record(const CorpusManifest& manifest, const UtteranceRecord& record) {
  SampleBuffer buf = decode_audio(record.audio_path);
  if (buf.sample_rate != manifest.sample_rate)
    raise(Errc::UnsupportedFormat,
          record.audio_path.string() + ": sample rate " + std::to_string(buf.sample_rate) +
              " does not match manifest rate " + std::to_string(manifest.sample_rate) +
              " (resampling is never applied)");
  return buf;
}

}  // namespace wavepmf
