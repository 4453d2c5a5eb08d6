// core/src/embedding.cpp

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

#include "wavepmf/embedding.hpp"

#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "wavepmf/errors.hpp"
#include "wavepmf/parallel.hpp"
#include "wavepmf/tsv.hpp"

namespace wavepmf {

ReferenceBank build_references(const CorpusManifest& manifest, const RecordFilter& base_filter,
                               const FilterBankSpec& spec, double epsilon,
                               std::vector<MeasureId> roster, std::vector<Label> reference_labels,
                               unsigned workers) {
  if (roster.empty()) raise(Errc::InvalidSpec, "empty measure roster");
  if (reference_labels.empty()) raise(Errc::InvalidSpec, "no reference classes requested");

  ReferenceBank out;
  out.bank = design_bank(spec);
  out.epsilon = epsilon;
  out.roster = std::move(roster);
  out.reference_labels = std::move(reference_labels);

  const FilterRunner runner(out.bank);
  const std::size_t n_channels = out.bank.channels.size();

  for (Label cls : out.reference_labels) {
    RecordFilter f = base_filter;
    f.label = cls;
    const std::vector<UtteranceRecord> selection = select(manifest, f);
    if (selection.empty())
      raise(Errc::EmptySelection,
            std::string("no training records for reference class ") + label_name(cls));

    std::vector<Histogram> acc(n_channels);
    std::mutex mu;
    parallel_for(selection.size(), workers, [&](std::size_t i) {
      SampleBuffer buf;
      try {
        buf = decode_record(manifest, selection[i]);
      } catch (const Error& e) {
        throw Error(e.code(), selection[i].utt_id + ": " + e.what());
      }
      const std::vector<SampleBuffer> filtered = runner.apply_all(buf);
      std::vector<Histogram> hists(n_channels);
      for (std::size_t c = 0; c < n_channels; ++c) hists[c] = histogram_of(filtered[c]);
      std::lock_guard<std::mutex> lock(mu);  // integer merge, order-independent
      for (std::size_t c = 0; c < n_channels; ++c) {
        for (std::size_t b = 0; b < Histogram::kBins; ++b)
          acc[c].counts[b] += hists[c].counts[b];
        acc[c].total += hists[c].total;
      }
    });

    std::vector<Pmf> refs(n_channels);
    for (std::size_t c = 0; c < n_channels; ++c) refs[c] = normalize(acc[c], 0.0);
    out.references.push_back(std::move(refs));
  }
  return out;
}

Embedder::Embedder(ReferenceBank bank) : bank_(std::move(bank)), runner_(bank_.bank) {
  if (bank_.references.size() != bank_.reference_labels.size())
    raise(Errc::InvalidSpec, "reference bank class count mismatch");
  for (const auto& refs : bank_.references)
    if (refs.size() != bank_.bank.channels.size())
      raise(Errc::InvalidSpec, "reference bank channel count mismatch");
}

std::vector<double> Embedder::embed(const SampleBuffer& buffer) const {
  if (buffer.samples.empty()) raise(Errc::EmptyBuffer, "cannot embed an empty buffer");
  const std::size_t n_channels = bank_.bank.channels.size();
  const std::vector<SampleBuffer> filtered = runner_.apply_all(buffer);

  std::vector<double> values;
  values.reserve(bank_.dimension());
  for (std::size_t cls = 0; cls < bank_.references.size(); ++cls) {
    for (std::size_t c = 0; c < n_channels; ++c) {
      const Pmf trial = normalize(histogram_of(filtered[c]), 0.0);
      for (MeasureId id : bank_.roster)
        values.push_back(compute_measure(id, trial, bank_.references[cls][c], bank_.epsilon).value);
    }
  }
  return values;
}

std::vector<EmbeddingVector> Embedder::embed_corpus(const CorpusManifest& manifest,
                                                    const RecordFilter& filter,
                                                    unsigned workers) const {
  const std::vector<UtteranceRecord> selection = select(manifest, filter);
  if (selection.empty()) raise(Errc::EmptySelection, "no records match the embedding filter");
  std::vector<EmbeddingVector> out(selection.size());
  parallel_for(selection.size(), workers, [&](std::size_t i) {
    SampleBuffer buf;
    try {
      buf = decode_record(manifest, selection[i]);
    } catch (const Error& e) {
      throw Error(e.code(), selection[i].utt_id + ": " + e.what());
    }
    out[i].utt_id = selection[i].utt_id;
    out[i].values = embed(buf);
  });
  return out;
}

void export_embeddings_tsv(const std::vector<EmbeddingVector>& vectors,
                           const std::vector<UtteranceRecord>& records,
                           const std::filesystem::path& path,
                           std::span<const std::string> header_comments) {
  if (vectors.size() != records.size())
    raise(Errc::DimensionMismatch, "embedding/record count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  for (const std::string& line : header_comments) out << "# " << line << "\n";
  const std::size_t dim = vectors.empty() ? 0 : vectors.front().values.size();
  out << "utt_id\tlabel\tsubset\tgender\tcodec";
  for (std::size_t d = 0; d < dim; ++d) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "e%03zu", d);
    out << '\t' << buf;
  }
  out << '\n';
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const UtteranceRecord& r = records[i];
    out << vectors[i].utt_id << '\t' << label_name(r.label) << '\t' << subset_name(r.subset)
        << '\t' << gender_name(r.gender) << '\t' << (r.codec.empty() ? "none" : r.codec);
    for (double v : vectors[i].values) out << '\t' << format_double(v);
    out << '\n';
  }
  if (!out) raise(Errc::IoError, "short write: " + path.string());
}

// --- serialization --------------------------------------------------------

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class ByteCursor {
 public:
  ByteCursor(std::string_view bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  void magic(const char* m) {
    need(4);
    if (std::memcmp(bytes_.data() + pos_, m, 4) != 0)
      raise(Errc::BadFile, what_ + ": bad magic");
    pos_ += 4;
  }

  std::string_view raw(std::size_t n) {
    need(n);
    std::string_view v = bytes_.substr(pos_, n);
    pos_ += n;
    return v;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size()) raise(Errc::BadFile, what_ + ": truncated");
  }
  std::string_view bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string reference_bank_to_bytes(const ReferenceBank& bank) {
  std::string out;
  out.append("REF1", 4);
  put_u32(out, static_cast<std::uint32_t>(bank.bank.spec.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(bank.bank.spec.n_channels_per_family));
  put_f64(out, bank.bank.spec.f_min);
  put_f64(out, bank.bank.spec.f_max);
  put_u32(out, static_cast<std::uint32_t>(bank.bank.spec.order));
  put_u32(out, static_cast<std::uint32_t>(bank.bank.spec.fir_length));
  put_f64(out, bank.bank.gain);
  put_f64(out, bank.epsilon);
  put_u32(out, static_cast<std::uint32_t>(bank.roster.size()));
  for (MeasureId m : bank.roster) put_u32(out, static_cast<std::uint32_t>(m));
  put_u32(out, static_cast<std::uint32_t>(bank.reference_labels.size()));
  for (Label l : bank.reference_labels) put_u32(out, l == Label::BonaFide ? 0u : 1u);
  put_u32(out, static_cast<std::uint32_t>(bank.bank.channels.size()));
  for (const FilterChannel& ch : bank.bank.channels) {
    put_u32(out, static_cast<std::uint32_t>(ch.channel_index));
    put_u32(out, ch.family == FilterFamily::Gammatone ? 0u : 1u);
    put_f64(out, ch.center_freq);
    put_u32(out, static_cast<std::uint32_t>(ch.group_delay));
    put_f64(out, ch.bank_gain);
    put_u32(out, static_cast<std::uint32_t>(ch.coefficients.size()));
    for (double t : ch.coefficients) put_f64(out, t);
  }
  for (const auto& refs : bank.references) {
    for (const Pmf& p : refs) {
      const std::string bytes = pmf_to_bytes(p);
      put_u32(out, static_cast<std::uint32_t>(bytes.size()));
      out += bytes;
    }
  }
  return out;
}

ReferenceBank reference_bank_from_bytes(std::string_view bytes) {
  ByteCursor in(bytes, "REF1 container");
  in.magic("REF1");
  ReferenceBank bank;
  bank.bank.spec.sample_rate = static_cast<int>(in.u32());
  bank.bank.spec.n_channels_per_family = static_cast<int>(in.u32());
  bank.bank.spec.f_min = in.f64();
  bank.bank.spec.f_max = in.f64();
  bank.bank.spec.order = static_cast<int>(in.u32());
  bank.bank.spec.fir_length = static_cast<int>(in.u32());
  bank.bank.gain = in.f64();
  bank.epsilon = in.f64();
  const std::uint32_t n_roster = in.u32();
  for (std::uint32_t i = 0; i < n_roster; ++i)
    bank.roster.push_back(static_cast<MeasureId>(in.u32()));
  const std::uint32_t n_labels = in.u32();
  for (std::uint32_t i = 0; i < n_labels; ++i)
    bank.reference_labels.push_back(in.u32() == 0 ? Label::BonaFide : Label::Spoof);
  const std::uint32_t n_channels = in.u32();
  for (std::uint32_t c = 0; c < n_channels; ++c) {
    FilterChannel ch;
    ch.channel_index = static_cast<int>(in.u32());
    ch.family = in.u32() == 0 ? FilterFamily::Gammatone : FilterFamily::InverseGammatone;
    ch.center_freq = in.f64();
    ch.group_delay = static_cast<int>(in.u32());
    ch.bank_gain = in.f64();
    const std::uint32_t n_taps = in.u32();
    ch.coefficients.resize(n_taps);
    for (std::uint32_t t = 0; t < n_taps; ++t) ch.coefficients[t] = in.f64();
    bank.bank.channels.push_back(std::move(ch));
  }
  for (std::uint32_t l = 0; l < n_labels; ++l) {
    std::vector<Pmf> refs;
    refs.reserve(n_channels);
    for (std::uint32_t c = 0; c < n_channels; ++c) {
      const std::uint32_t len = in.u32();
      refs.push_back(pmf_from_bytes(in.raw(len)));
    }
    bank.references.push_back(std::move(refs));
  }
  if (!in.done()) raise(Errc::BadFile, "REF1 container: trailing bytes");
  return bank;
}

void save_reference_bank(const ReferenceBank& bank, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  const std::string bytes = reference_bank_to_bytes(bank);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(Errc::IoError, "short write: " + path.string());
}

ReferenceBank load_reference_bank(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return reference_bank_from_bytes(ss.str());
}

}  // namespace wavepmf
