// core/src/pmf.cpp

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

#include "wavepmf/pmf.hpp"

#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "wavepmf/errors.hpp"
#include "wavepmf/parallel.hpp"
#include "wavepmf/tsv.hpp"

namespace wavepmf {

Histogram histogram_of(const SampleBuffer& buffer) {
  if (buffer.samples.empty()) raise(Errc::EmptyBuffer, "cannot histogram an empty buffer");
  Histogram h;
  for (std::int16_t s : buffer.samples) ++h.counts[Histogram::bin_of(s)];
  h.total = buffer.samples.size();
  return h;
}

Histogram merge(const Histogram& a, const Histogram& b) {
  Histogram out;
  for (std::size_t i = 0; i < Histogram::kBins; ++i) out.counts[i] = a.counts[i] + b.counts[i];
  out.total = a.total + b.total;
  return out;
}

Pmf normalize(const Histogram& h, double epsilon) {
  if (h.total < 1) raise(Errc::EmptyHistogram, "histogram total is zero");
  if (epsilon < 0) raise(Errc::EmptyHistogram, "negative smoothing epsilon");
  Pmf p;
  p.smoothing_epsilon = epsilon;
  p.probs.resize(Histogram::kBins);
  const double denom =
      static_cast<double>(h.total) + static_cast<double>(Histogram::kBins) * epsilon;
  for (std::size_t i = 0; i < Histogram::kBins; ++i)
    p.probs[i] = (static_cast<double>(h.counts[i]) + epsilon) / denom;
  return p;
}

Pmf smooth(const Pmf& p, double epsilon) {
  if (epsilon <= 0) return p;
  Pmf out;
  out.smoothing_epsilon = p.smoothing_epsilon + epsilon;
  out.probs.resize(p.probs.size());
  const double denom = 1.0 + static_cast<double>(p.probs.size()) * epsilon;
  for (std::size_t i = 0; i < p.probs.size(); ++i) out.probs[i] = (p.probs[i] + epsilon) / denom;
  return out;
}

std::vector<double> cdf_of(const Pmf& p) {
  std::vector<double> cdf(p.probs.size());
  double sum = 0.0, comp = 0.0;  // Kahan running sum
  for (std::size_t i = 0; i < p.probs.size(); ++i) {
    double y = p.probs[i] - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    cdf[i] = sum;
  }
  return cdf;
}

double kahan_sum(std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    double y = v - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

Histogram class_histogram(const CorpusManifest& manifest, const RecordFilter& filter,
                          unsigned workers) {
  const std::vector<UtteranceRecord> selection = select(manifest, filter);
  if (selection.empty()) raise(Errc::EmptySelection, "no records match the class filter");
  Histogram acc;
  std::mutex mu;
  parallel_for(selection.size(), workers, [&](std::size_t i) {
    SampleBuffer buf;
    try {
      buf = decode_record(manifest, selection[i]);
    } catch (const Error& e) {
      throw Error(e.code(), selection[i].utt_id + ": " + e.what());
    }
    Histogram h = histogram_of(buf);
    std::lock_guard<std::mutex> lock(mu);  // integer merge is order-independent
    for (std::size_t b = 0; b < Histogram::kBins; ++b) acc.counts[b] += h.counts[b];
    acc.total += h.total;
  });
  return acc;
}

Pmf class_pmf(const CorpusManifest& manifest, const RecordFilter& filter, double epsilon,
              PmfWeighting weighting, unsigned workers) {
  if (weighting == PmfWeighting::PooledSamples)
    return normalize(class_histogram(manifest, filter, workers), epsilon);

  const std::vector<UtteranceRecord> selection = select(manifest, filter);
  if (selection.empty()) raise(Errc::EmptySelection, "no records match the class filter");
  std::vector<Pmf> per_utt(selection.size());
  parallel_for(selection.size(), workers, [&](std::size_t i) {
    SampleBuffer buf;
    try {
      buf = decode_record(manifest, selection[i]);
    } catch (const Error& e) {
      throw Error(e.code(), selection[i].utt_id + ": " + e.what());
    }
    per_utt[i] = normalize(histogram_of(buf), 0.0);
  });
  Pmf mean;
  mean.probs.assign(Histogram::kBins, 0.0);
  const double w = 1.0 / static_cast<double>(per_utt.size());
  for (const Pmf& p : per_utt)
    for (std::size_t b = 0; b < Histogram::kBins; ++b) mean.probs[b] += w * p.probs[b];
  if (epsilon > 0) mean = smooth(mean, epsilon);
  return mean;
}

// --- serialization --------------------------------------------------------

namespace {

constexpr char kPmfMagic[4] = {'P', 'M', 'F', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view in, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[off + i])) << (8 * i);
  return v;
}

double get_f64(std::string_view in, std::size_t off) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[off + i])) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

std::string pmf_to_bytes(const Pmf& p) {
  std::string out;
  out.reserve(16 + 8 * p.probs.size());
  out.append(kPmfMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(p.probs.size()));
  put_f64(out, p.smoothing_epsilon);
  for (double v : p.probs) put_f64(out, v);
  return out;
}

Pmf pmf_from_bytes(std::string_view bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kPmfMagic, 4) != 0)
    raise(Errc::BadFile, "not a PMF1 container");
  const std::uint32_t n = get_u32(bytes, 4);
  if (bytes.size() != 16 + 8 * static_cast<std::size_t>(n))
    raise(Errc::BadFile, "truncated PMF1 container");
  Pmf p;
  p.smoothing_epsilon = get_f64(bytes, 8);
  p.probs.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) p.probs[i] = get_f64(bytes, 16 + 8 * static_cast<std::size_t>(i));
  return p;
}

void save_pmf(const Pmf& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  const std::string bytes = pmf_to_bytes(p);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(Errc::IoError, "short write: " + path.string());
}

Pmf load_pmf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return pmf_from_bytes(ss.str());
}

void export_pmf_tsv(const Pmf& p, const std::filesystem::path& path,
                    std::span<const std::string> header_comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  for (const std::string& line : header_comments) out << "# " << line << "\n";
  out << "bin_index\tamplitude\tprob\n";
  const bool full_range = p.probs.size() == Histogram::kBins;
  for (std::size_t i = 0; i < p.probs.size(); ++i) {
    if (p.probs[i] == 0.0) continue;
    const int amp = full_range ? Histogram::amplitude_of(i) : static_cast<int>(i);
    out << i << '\t' << amp << '\t' << format_double(p.probs[i]) << '\n';
  }
  if (!out) raise(Errc::IoError, "short write: " + path.string());
}

}  // namespace wavepmf
