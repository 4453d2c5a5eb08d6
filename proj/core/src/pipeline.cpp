// core/src/pipeline.cpp

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

#include "wavepmf/pipeline.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include "wavepmf/errors.hpp"
#include "wavepmf/tsv.hpp"
#include "wavepmf/version.hpp"

namespace wavepmf {

namespace {

std::string sanitize_tag(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')
      out.push_back(c);
    else if (c >= 'A' && c <= 'Z')
      out.push_back(static_cast<char>(c - 'A' + 'a'));
    else
      out.push_back('_');
  }
  return out;
}

std::vector<std::string_view> split_char(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = s.find(sep, start);
    if (p == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
  return out;
}

SelectionSpec parse_selection(std::string_view text,
                              const std::map<std::string, CorpusRef>& corpora) {
  SelectionSpec sel;
  sel.display = std::string(trim(text));
  const auto tokens = split_char(sel.display, '/');
  if (tokens.empty() || tokens.front().empty())
    raise(Errc::BadConfig, "empty selection '" + sel.display + "'");
  sel.corpus_key = std::string(tokens.front());
  if (corpora.find(sel.corpus_key) == corpora.end())
    raise(Errc::BadConfig, "selection '" + sel.display + "' names unknown corpus '" +
                               sel.corpus_key + "'");
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const std::string_view t = trim(tokens[i]);
    if (t == "train") sel.filter.subset = Subset::Train;
    else if (t == "dev") sel.filter.subset = Subset::Dev;
    else if (t == "eval") sel.filter.subset = Subset::Eval;
    else if (t == "bonafide") sel.filter.label = Label::BonaFide;
    else if (t == "spoof") sel.filter.label = Label::Spoof;
    else if (t == "male") sel.filter.gender = Gender::Male;
    else if (t == "female") sel.filter.gender = Gender::Female;
    else if (t == "nocodec") sel.filter.codec_none = true;
    else if (t.substr(0, 6) == "codec=") sel.filter.codec_name = std::string(t.substr(6));
    else
      raise(Errc::BadConfig, "selection '" + sel.display + "': unknown token '" +
                                 std::string(t) + "'");
  }
  sel.tag = sanitize_tag(sel.display);
  return sel;
}

std::string filter_canonical(const RecordFilter& f) {
  std::string out;
  out += "subset=";
  out += f.subset ? subset_name(*f.subset) : "*";
  out += ";label=";
  out += f.label ? label_name(*f.label) : "*";
  out += ";gender=";
  out += f.gender ? gender_name(*f.gender) : "*";
  out += ";codec=";
  if (f.codec_name) out += *f.codec_name;
  else if (f.codec_none) out += *f.codec_none ? "none" : "any-coded";
  else out += "*";
  return out;
}

std::string bank_canonical(const FilterBankSpec& b) {
  std::string out;
  out += "sr=" + std::to_string(b.sample_rate);
  out += ";n=" + std::to_string(b.n_channels_per_family);
  out += ";fmin=" + format_double(b.f_min);
  out += ";fmax=" + format_double(b.f_max);
  out += ";order=" + std::to_string(b.order);
  out += ";len=" + std::to_string(b.fir_length);
  return out;
}

Subset parse_subset_token(std::string_view t, const std::string& context) {
  if (t == "train") return Subset::Train;
  if (t == "dev") return Subset::Dev;
  if (t == "eval") return Subset::Eval;
  raise(Errc::BadConfig, context + ": bad subset token '" + std::string(t) + "'");
}

// "<corpus>/<subset>", both required
std::pair<std::string, Subset> parse_corpus_subset(std::string_view text,
                                                   const std::map<std::string, CorpusRef>& corpora,
                                                   const std::string& context) {
  const auto tokens = split_char(trim(text), '/');
  if (tokens.size() != 2)
    raise(Errc::BadConfig, context + ": expected <corpus>/<subset>, got '" + std::string(text) + "'");
  const std::string key(tokens[0]);
  if (corpora.find(key) == corpora.end())
    raise(Errc::BadConfig, context + ": unknown corpus '" + key + "'");
  return {key, parse_subset_token(trim(tokens[1]), context)};
}

std::string selection_subset_token(const SelectionSpec& sel) {
  std::string out = sel.filter.subset ? subset_name(*sel.filter.subset) : "all";
  if (sel.filter.codec_none && *sel.filter.codec_none) out += "(nocodec)";
  if (sel.filter.codec_name) out += "(codec=" + *sel.filter.codec_name + ")";
  if (sel.filter.gender) out += std::string("(") + gender_name(*sel.filter.gender) + ")";
  return out;
}

std::string selection_class_token(const SelectionSpec& sel) {
  return sel.filter.label ? label_name(*sel.filter.label) : "all";
}

// "EMB1" cache container for per-selection embeddings.
std::string embeddings_to_bytes(const std::vector<EmbeddingVector>& vecs) {
  std::string out;
  out.append("EMB1", 4);
  auto put_u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  };
  auto put_f64 = [&](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  };
  put_u32(static_cast<std::uint32_t>(vecs.size()));
  put_u32(vecs.empty() ? 0u : static_cast<std::uint32_t>(vecs.front().values.size()));
  for (const EmbeddingVector& v : vecs) {
    put_u32(static_cast<std::uint32_t>(v.utt_id.size()));
    out += v.utt_id;
    for (double x : v.values) put_f64(x);
  }
  return out;
}

std::vector<EmbeddingVector> embeddings_from_bytes(std::string_view bytes) {
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (pos + n > bytes.size()) raise(Errc::BadFile, "EMB1 container: truncated");
  };
  auto get_u32 = [&]() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    pos += 4;
    return v;
  };
  auto get_f64 = [&]() {
    need(8);
    std::uint64_t b = 0;
    for (int i = 0; i < 8; ++i)
      b |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    pos += 8;
    double v;
    std::memcpy(&v, &b, 8);
    return v;
  };
  need(4);
  if (bytes.substr(0, 4) != "EMB1") raise(Errc::BadFile, "not an EMB1 container");
  pos = 4;
  const std::uint32_t n = get_u32();
  const std::uint32_t dim = get_u32();
  std::vector<EmbeddingVector> out(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t idlen = get_u32();
    need(idlen);
    out[i].utt_id = std::string(bytes.substr(pos, idlen));
    pos += idlen;
    out[i].values.resize(dim);
    for (std::uint32_t d = 0; d < dim; ++d) out[i].values[d] = get_f64();
  }
  if (pos != bytes.size()) raise(Errc::BadFile, "EMB1 container: trailing bytes");
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  out << text;
  if (!out) raise(Errc::IoError, "short write: " + path.string());
}

void write_binary_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(Errc::IoError, "short write: " + path.string());
}

}  // namespace

std::string RunConfig::canonical_string() const {
  std::ostringstream out;
  out << "wavepmf-config-v1\n";
  out << "workspace=" << workspace.string() << "\n";
  out << "epsilon=" << format_double(epsilon) << "\n";
  out << "kl_convention=" << (kl_convention == SymKlConvention::Mean ? "mean" : "sum") << "\n";
  out << "weighting=" << (weighting == PmfWeighting::PooledSamples ? "pooled" : "mean") << "\n";
  out << "all_measures=" << (all_measures ? 1 : 0) << "\n";
  out << "projection=" << (use_pca_fallback ? "pca" : "umap") << "\n";
  for (const auto& [key, ref] : corpora)
    out << "corpus." << key << "=" << ref.manifest_path.string() << "|" << ref.display_name << "\n";
  out << "bank=" << bank_canonical(bank) << "\n";
  out << "roster=";
  for (MeasureId m : roster) out << measure_name(m) << ",";
  out << "\n";
  out << "classes=";
  for (Label l : reference_classes) out << label_name(l) << ",";
  out << "\n";
  out << "umap=" << umap.n_neighbors << "," << format_double(umap.min_dist) << ","
      << umap.fit_epochs << "," << umap.transform_epochs << "," << umap.negative_sample_rate
      << "," << format_double(umap.learning_rate) << "," << format_double(umap.repulsion_strength)
      << "," << umap.seed << "\n";
  for (const SelectionSpec& s : pmf_selections) out << "pmf=" << s.display << "\n";
  for (const CompareSpec& c : comparisons)
    out << "compare=" << c.a.display << " vs " << c.b.display << "\n";
  if (fit_selection) out << "fit=" << fit_selection->display << "\n";
  for (const SelectionSpec& s : project_selections) out << "project=" << s.display << "\n";
  if (eval_dev)
    out << "eval.dev=" << eval_dev->corpus_key << "/" << subset_name(eval_dev->subset) << "|"
        << eval_dev->scores_path.string() << "\n";
  for (const EvalTargetSpec& t : eval_targets)
    out << "eval.target=" << t.corpus_key << "/" << subset_name(t.subset) << "|"
        << t.scores_path.string() << "\n";
  out << "eval=" << eval.n_bootstrap << "," << format_double(eval.alpha_percent) << ","
      << eval.seed << "," << (eval.higher_is_bonafide ? "higher" : "lower") << "\n";
  return out.str();
}

RunConfig parse_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open config: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config_text(ss.str(), path.has_parent_path() ? path.parent_path() : ".");
}

RunConfig parse_run_config_text(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t line_no = 0;
  for (std::string_view rest = text; !rest.empty();) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = nl == std::string_view::npos ? rest : rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      raise(Errc::BadConfig, "config line " + std::to_string(line_no) + ": expected key = value");
    entries.emplace_back(std::string(trim(line.substr(0, eq))),
                         std::string(trim(line.substr(eq + 1))));
  }

  RunConfig cfg;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base_dir / fp;
  };

  // corpora first: selections reference them
  for (const auto& [key, value] : entries) {
    if (key.rfind("corpus.", 0) != 0) continue;
    const auto parts = split_char(key, '.');
    if (parts.size() != 3)
      raise(Errc::BadConfig, "bad corpus key '" + key + "' (use corpus.<key>.manifest)");
    const std::string ckey(parts[1]);
    if (parts[2] == "manifest")
      cfg.corpora[ckey].manifest_path = resolve(value);
    else if (parts[2] == "name")
      cfg.corpora[ckey].display_name = value;
    else
      raise(Errc::BadConfig, "unknown corpus field '" + key + "'");
  }

  auto need_double = [&](const std::string& key, const std::string& v) {
    const auto d = parse_double(v);
    if (!d) raise(Errc::BadConfig, key + ": expected a number, got '" + v + "'");
    return *d;
  };
  auto need_int = [&](const std::string& key, const std::string& v) {
    const auto d = parse_int(v);
    if (!d) raise(Errc::BadConfig, key + ": expected an integer, got '" + v + "'");
    return *d;
  };

  for (const auto& [key, value] : entries) {
    if (key.rfind("corpus.", 0) == 0) continue;
    if (key == "workspace") cfg.workspace = resolve(value);
    else if (key == "epsilon") cfg.epsilon = need_double(key, value);
    else if (key == "workers") cfg.workers = static_cast<unsigned>(need_int(key, value));
    else if (key == "kl_convention") {
      if (value == "mean") cfg.kl_convention = SymKlConvention::Mean;
      else if (value == "sum") cfg.kl_convention = SymKlConvention::Sum;
      else raise(Errc::BadConfig, "kl_convention must be mean or sum");
    } else if (key == "pmf_weighting") {
      if (value == "pooled") cfg.weighting = PmfWeighting::PooledSamples;
      else if (value == "mean") cfg.weighting = PmfWeighting::PerUtteranceMean;
      else raise(Errc::BadConfig, "pmf_weighting must be pooled or mean");
    } else if (key == "all_measures") {
      cfg.all_measures = value == "true" || value == "1";
    } else if (key == "projection") {
      if (value == "umap") cfg.use_pca_fallback = false;
      else if (value == "pca") cfg.use_pca_fallback = true;
      else raise(Errc::BadConfig, "projection must be umap or pca");
    } else if (key == "bank.sample_rate") cfg.bank.sample_rate = static_cast<int>(need_int(key, value));
    else if (key == "bank.channels_per_family") cfg.bank.n_channels_per_family = static_cast<int>(need_int(key, value));
    else if (key == "bank.f_min") cfg.bank.f_min = need_double(key, value);
    else if (key == "bank.f_max") cfg.bank.f_max = need_double(key, value);
    else if (key == "bank.order") cfg.bank.order = static_cast<int>(need_int(key, value));
    else if (key == "bank.fir_length") cfg.bank.fir_length = static_cast<int>(need_int(key, value));
    else if (key == "roster") {
      cfg.roster.clear();
      for (const auto tok : split_char(value, ',')) {
        const auto m = measure_from_name(trim(tok));
        if (!m) raise(Errc::BadConfig, "roster: unknown measure '" + std::string(trim(tok)) + "'");
        cfg.roster.push_back(*m);
      }
      if (cfg.roster.empty()) raise(Errc::BadConfig, "roster must not be empty");
    } else if (key == "reference_classes") {
      if (value == "bonafide") cfg.reference_classes = {Label::BonaFide};
      else if (value == "spoof") cfg.reference_classes = {Label::Spoof};
      else if (value == "both") cfg.reference_classes = {Label::BonaFide, Label::Spoof};
      else raise(Errc::BadConfig, "reference_classes must be bonafide, spoof, or both");
    } else if (key == "umap.n_neighbors") cfg.umap.n_neighbors = static_cast<int>(need_int(key, value));
    else if (key == "umap.min_dist") cfg.umap.min_dist = need_double(key, value);
    else if (key == "umap.fit_epochs") cfg.umap.fit_epochs = static_cast<int>(need_int(key, value));
    else if (key == "umap.transform_epochs") cfg.umap.transform_epochs = static_cast<int>(need_int(key, value));
    else if (key == "umap.negative_sample_rate") cfg.umap.negative_sample_rate = static_cast<int>(need_int(key, value));
    else if (key == "umap.seed") cfg.umap.seed = static_cast<std::uint64_t>(need_int(key, value));
    else if (key == "pmf") cfg.pmf_selections.push_back(parse_selection(value, cfg.corpora));
    else if (key == "compare") {
      const std::size_t vs = value.find(" vs ");
      if (vs == std::string::npos)
        raise(Errc::BadConfig, "compare: expected '<selection> vs <selection>'");
      CompareSpec cmp{parse_selection(value.substr(0, vs), cfg.corpora),
                      parse_selection(value.substr(vs + 4), cfg.corpora)};
      cfg.comparisons.push_back(std::move(cmp));
    } else if (key == "fit") {
      if (cfg.fit_selection) raise(Errc::BadConfig, "fit declared twice");
      cfg.fit_selection = parse_selection(value, cfg.corpora);
    } else if (key == "project") {
      cfg.project_selections.push_back(parse_selection(value, cfg.corpora));
    } else if (key == "eval.dev") {
      const auto [ckey, subset] = parse_corpus_subset(value, cfg.corpora, key);
      if (!cfg.eval_dev) cfg.eval_dev.emplace();
      cfg.eval_dev->corpus_key = ckey;
      cfg.eval_dev->subset = subset;
    } else if (key == "eval.dev_scores") {
      if (!cfg.eval_dev) cfg.eval_dev.emplace();
      cfg.eval_dev->scores_path = resolve(value);
    } else if (key == "eval.target") {
      const std::size_t sp = value.find(" scores=");
      if (sp == std::string::npos)
        raise(Errc::BadConfig, "eval.target: expected '<corpus>/<subset> scores=<path>'");
      const auto [ckey, subset] = parse_corpus_subset(value.substr(0, sp), cfg.corpora, key);
      EvalTargetSpec t;
      t.corpus_key = ckey;
      t.subset = subset;
      t.scores_path = resolve(value.substr(sp + 8));
      cfg.eval_targets.push_back(std::move(t));
    } else if (key == "eval.n_bootstrap") cfg.eval.n_bootstrap = static_cast<int>(need_int(key, value));
    else if (key == "eval.alpha") cfg.eval.alpha_percent = need_double(key, value);
    else if (key == "eval.seed") cfg.eval.seed = static_cast<std::uint64_t>(need_int(key, value));
    else if (key == "eval.polarity") {
      if (value == "higher") cfg.eval.higher_is_bonafide = true;
      else if (value == "lower") cfg.eval.higher_is_bonafide = false;
      else raise(Errc::BadConfig, "eval.polarity must be higher or lower");
    } else {
      raise(Errc::BadConfig, "unknown config key '" + key + "'");
    }
  }

  if (cfg.workspace.empty()) raise(Errc::BadConfig, "workspace is required");
  cfg.eval.workers = cfg.workers;
  return cfg;
}

void RunStats::merge(const RunStats& other) {
  cache_hits += other.cache_hits;
  cache_misses += other.cache_misses;
  outputs.insert(outputs.end(), other.outputs.begin(), other.outputs.end());
}

Pipeline::Pipeline(RunConfig config)
    : config_(std::move(config)),
      config_hash_(sha256_hex(config_.canonical_string())),
      cache_(config_.workspace / "cache"),
      reports_dir_(config_.workspace / "reports") {
  std::filesystem::create_directories(reports_dir_);
  for (const auto& [key, ref] : config_.corpora) {
    CorpusManifest m = parse_manifest(ref.manifest_path);
    manifest_hashes_[key] = sha256_hex_file(ref.manifest_path);
    manifests_[key] = std::move(m);
  }
  validate_declared_selections();
}

void Pipeline::validate_declared_selections() const {
  auto check = [&](const SelectionSpec& sel, const char* what) {
    if (count_matching(manifest(sel.corpus_key), sel.filter) == 0)
      raise(Errc::EmptySelection,
            std::string(what) + " selection '" + sel.display + "' matches no records");
  };
  for (const SelectionSpec& s : config_.pmf_selections) check(s, "pmf");
  for (const CompareSpec& c : config_.comparisons) {
    check(c.a, "compare");
    check(c.b, "compare");
  }
  if (config_.fit_selection) check(*config_.fit_selection, "fit");
  for (const SelectionSpec& s : config_.project_selections) check(s, "project");
  if (!config_.project_selections.empty() && !config_.fit_selection)
    raise(Errc::BadConfig, "project selections declared without a fit selection");
}

const CorpusManifest& Pipeline::manifest(const std::string& corpus_key) const {
  const auto it = manifests_.find(corpus_key);
  if (it == manifests_.end()) raise(Errc::BadConfig, "unknown corpus '" + corpus_key + "'");
  return it->second;
}

const std::string& Pipeline::manifest_hash(const std::string& corpus_key) const {
  return manifest_hashes_.at(corpus_key);
}

std::string Pipeline::corpus_display(const std::string& corpus_key) const {
  const auto it = config_.corpora.find(corpus_key);
  if (it != config_.corpora.end() && !it->second.display_name.empty())
    return it->second.display_name;
  return manifest(corpus_key).corpus_name;
}

std::vector<std::string> Pipeline::provenance_header() const {
  std::vector<std::string> out;
  out.push_back(std::string("wavepmf ") + kVersion);
  out.push_back("config_hash " + config_hash_);
  out.push_back("epsilon " + format_double(config_.epsilon));
  out.push_back("seed.umap " + std::to_string(config_.umap.seed));
  out.push_back("seed.eval " + std::to_string(config_.eval.seed));
  return out;
}

Pmf Pipeline::selection_pmf(const SelectionSpec& sel, double epsilon, RunStats& stats) {
  const std::string key = "pmf_v1|" + manifest_hash(sel.corpus_key) + "|" +
                          filter_canonical(sel.filter) + "|" +
                          (config_.weighting == PmfWeighting::PooledSamples ? "pooled" : "mean") +
                          "|eps=" + format_double(epsilon);
  if (auto cached = cache_.get(key)) {
    ++stats.cache_hits;
    return pmf_from_bytes(*cached);
  }
  ++stats.cache_misses;
  Pmf p = class_pmf(manifest(sel.corpus_key), sel.filter, epsilon, config_.weighting,
                    config_.workers);
  cache_.put(key, pmf_to_bytes(p));
  return p;
}

RunStats Pipeline::cmd_pmf() {
  RunStats stats;
  const std::filesystem::path dir = reports_dir_ / "pmf";
  std::filesystem::create_directories(dir);
  const auto header = provenance_header();
  for (const SelectionSpec& sel : config_.pmf_selections) {
    const Pmf p = selection_pmf(sel, 0.0, stats);  // raw, for plotting
    const std::filesystem::path bin = dir / (sel.tag + ".pmf");
    write_binary_file(bin, pmf_to_bytes(p));
    std::vector<std::string> h = header;
    h.push_back("selection " + sel.display);
    export_pmf_tsv(p, dir / (sel.tag + ".tsv"), h);
    std::string meta;
    for (const std::string& line : h) meta += "# " + line + "\n";
    write_text_file(dir / (sel.tag + ".pmf.meta"), meta);
    stats.outputs.push_back(bin);
    stats.outputs.push_back(dir / (sel.tag + ".tsv"));
  }
  return stats;
}

RunStats Pipeline::cmd_compare() {
  RunStats stats;
  const auto header = provenance_header();
  std::ostringstream out;
  for (const std::string& line : header) out << "# " << line << "\n";
  out << "# kl_convention "
      << (config_.kl_convention == SymKlConvention::Mean ? "mean" : "sum") << "\n";
  out << "# cross-corpus rows qualify subset_a as <corpus>:<subset>\n";
  out << "database\tsubset_a\tclass_a\tsubset_b\tclass_b\tmeasure\tvalue\n";

  const std::vector<MeasureId> headline = {MeasureId::SymmetricKL, MeasureId::ModifiedKS,
                                           MeasureId::Hellinger};
  const std::vector<MeasureId>& wanted = config_.all_measures ? config_.roster : headline;

  for (const CompareSpec& cmp : config_.comparisons) {
    const Pmf pa = selection_pmf(cmp.a, 0.0, stats);
    const Pmf pb = selection_pmf(cmp.b, 0.0, stats);
    const bool same_corpus = cmp.a.corpus_key == cmp.b.corpus_key;
    const std::string database = corpus_display(cmp.b.corpus_key);
    std::string subset_a = selection_subset_token(cmp.a);
    if (!same_corpus) subset_a = corpus_display(cmp.a.corpus_key) + ":" + subset_a;
    for (MeasureId id : wanted) {
      const MeasureValue mv =
          compute_measure(id, pa, pb, config_.epsilon, config_.kl_convention);
      out << database << '\t' << subset_a << '\t' << selection_class_token(cmp.a) << '\t'
          << selection_subset_token(cmp.b) << '\t' << selection_class_token(cmp.b) << '\t'
          << measure_name(id) << '\t' << format_double(mv.value) << '\n';
    }
  }
  const std::filesystem::path path = reports_dir_ / "compare.tsv";
  write_text_file(path, out.str());
  stats.outputs.push_back(path);
  return stats;
}

ReferenceBank Pipeline::fit_reference_bank(RunStats& stats) {
  const SelectionSpec& fit = *config_.fit_selection;
  std::string roster_str, class_str;
  for (MeasureId m : config_.roster) roster_str += std::string(measure_name(m)) + ",";
  for (Label l : config_.reference_classes) class_str += std::string(label_name(l)) + ",";
  const std::string key = "refbank_v1|" + manifest_hash(fit.corpus_key) + "|" +
                          filter_canonical(fit.filter) + "|" + bank_canonical(config_.bank) +
                          "|eps=" + format_double(config_.epsilon) + "|roster=" + roster_str +
                          "|classes=" + class_str;
  if (auto cached = cache_.get(key)) {
    ++stats.cache_hits;
    return reference_bank_from_bytes(*cached);
  }
  ++stats.cache_misses;
  ReferenceBank bank = build_references(manifest(fit.corpus_key), fit.filter, config_.bank,
                                        config_.epsilon, config_.roster,
                                        config_.reference_classes, config_.workers);
  cache_.put(key, reference_bank_to_bytes(bank));
  return bank;
}

std::vector<EmbeddingVector> Pipeline::selection_embeddings(const SelectionSpec& sel,
                                                            const Embedder& embedder,
                                                            const std::string& bank_key,
                                                            RunStats& stats) {
  const std::string key = "emb_v1|" + manifest_hash(sel.corpus_key) + "|" +
                          filter_canonical(sel.filter) + "|" + bank_key;
  if (auto cached = cache_.get(key)) {
    ++stats.cache_hits;
    return embeddings_from_bytes(*cached);
  }
  ++stats.cache_misses;
  std::vector<EmbeddingVector> vecs =
      embedder.embed_corpus(manifest(sel.corpus_key), sel.filter, config_.workers);
  cache_.put(key, embeddings_to_bytes(vecs));
  return vecs;
}

RunStats Pipeline::cmd_embed_project() {
  if (!config_.fit_selection)
    raise(Errc::BadConfig, "embed-project requires a fit selection");
  RunStats stats;
  const auto header = provenance_header();

  const ReferenceBank bank = fit_reference_bank(stats);
  std::string roster_str, class_str;
  for (MeasureId m : config_.roster) roster_str += std::string(measure_name(m)) + ",";
  for (Label l : config_.reference_classes) class_str += std::string(label_name(l)) + ",";
  const std::string bank_key =
      bank_canonical(config_.bank) + "|eps=" + format_double(config_.epsilon) +
      "|roster=" + roster_str + "|classes=" + class_str + "|fit=" +
      manifest_hash(config_.fit_selection->corpus_key) + ":" +
      filter_canonical(config_.fit_selection->filter);

  // bank exports for audit
  {
    std::vector<std::string> h = header;
    h.push_back("fit " + config_.fit_selection->display);
    export_bank_tsv(bank.bank, reports_dir_ / "filterbank.tsv", h);
    export_bank_taps(bank.bank, reports_dir_ / "filterbank_taps.bin");
    save_reference_bank(bank, reports_dir_ / "reference_bank.ref");
    std::string meta;
    for (const std::string& line : h) meta += "# " + line + "\n";
    write_text_file(reports_dir_ / "reference_bank.ref.meta", meta);
    stats.outputs.push_back(reports_dir_ / "filterbank.tsv");
    stats.outputs.push_back(reports_dir_ / "filterbank_taps.bin");
    stats.outputs.push_back(reports_dir_ / "reference_bank.ref");
  }

  const Embedder embedder(bank);
  const std::filesystem::path emb_dir = reports_dir_ / "embeddings";
  const std::filesystem::path cloud_dir = reports_dir_ / "pointclouds";
  std::filesystem::create_directories(emb_dir);
  std::filesystem::create_directories(cloud_dir);

  // fit embeddings + model
  const SelectionSpec& fit_sel = *config_.fit_selection;
  const std::vector<EmbeddingVector> fit_vecs =
      selection_embeddings(fit_sel, embedder, bank_key, stats);
  {
    const auto records = select(manifest(fit_sel.corpus_key), fit_sel.filter);
    std::vector<std::string> h = header;
    h.push_back("selection " + fit_sel.display);
    export_embeddings_tsv(fit_vecs, records, emb_dir / (fit_sel.tag + ".tsv"), h);
    stats.outputs.push_back(emb_dir / (fit_sel.tag + ".tsv"));
  }

  std::vector<std::vector<double>> fit_mat;
  fit_mat.reserve(fit_vecs.size());
  for (const EmbeddingVector& v : fit_vecs) fit_mat.push_back(v.values);

  UmapModel model;
  std::vector<Point2> fit_positions;
  if (config_.use_pca_fallback) {
    fit_positions = pca_project(fit_mat);
  } else {
    model = umap_fit(fit_mat, config_.umap);
    fit_positions = model.positions;
    save_umap_model(model, reports_dir_ / "umap_model.ump");
    std::string meta;
    for (const std::string& line : header) meta += "# " + line + "\n";
    write_text_file(reports_dir_ / "umap_model.ump.meta", meta);
    stats.outputs.push_back(reports_dir_ / "umap_model.ump");
  }

  std::ostringstream disp;
  for (const std::string& line : header) disp << "# " << line << "\n";
  disp << "selection\trole\tn_points\tdispersion\n";

  auto write_cloud = [&](const SelectionSpec& sel, const std::string& role,
                         const std::vector<EmbeddingVector>& vecs,
                         const std::vector<Point2>& pts) {
    const auto records = select(manifest(sel.corpus_key), sel.filter);
    if (records.size() != pts.size() || vecs.size() != pts.size())
      raise(Errc::BadFile, "stale cache: embedding count mismatch for '" + sel.display + "'");
    std::ostringstream out;
    for (const std::string& line : header) out << "# " << line << "\n";
    out << "# selection " << sel.display << " role " << role << "\n";
    out << "utt_id\tx\ty\tlabel\tsubset\tgender\tcodec\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (records[i].utt_id != vecs[i].utt_id)
        raise(Errc::BadFile, "stale cache: utt_id order mismatch for '" + sel.display + "'");
      out << records[i].utt_id << '\t' << format_double(pts[i][0]) << '\t'
          << format_double(pts[i][1]) << '\t' << label_name(records[i].label) << '\t'
          << subset_name(records[i].subset) << '\t' << gender_name(records[i].gender) << '\t'
          << (records[i].codec.empty() ? "none" : records[i].codec) << '\n';
    }
    const std::filesystem::path p = cloud_dir / (sel.tag + "_" + role + ".tsv");
    write_text_file(p, out.str());
    stats.outputs.push_back(p);
    disp << sel.display << '\t' << role << '\t' << pts.size() << '\t'
         << format_double(dispersion(pts)) << '\n';
  };

  write_cloud(fit_sel, "fit", fit_vecs, fit_positions);

  for (const SelectionSpec& sel : config_.project_selections) {
    const std::vector<EmbeddingVector> vecs = selection_embeddings(sel, embedder, bank_key, stats);
    {
      const auto records = select(manifest(sel.corpus_key), sel.filter);
      std::vector<std::string> h = header;
      h.push_back("selection " + sel.display);
      export_embeddings_tsv(vecs, records, emb_dir / (sel.tag + ".tsv"), h);
      stats.outputs.push_back(emb_dir / (sel.tag + ".tsv"));
    }
    std::vector<std::vector<double>> mat;
    mat.reserve(vecs.size());
    for (const EmbeddingVector& v : vecs) mat.push_back(v.values);
    const std::vector<Point2> pts =
        config_.use_pca_fallback ? pca_project(mat) : umap_transform(model, mat);
    write_cloud(sel, "transform", vecs, pts);
  }

  const std::filesystem::path disp_path = reports_dir_ / "dispersion.tsv";
  write_text_file(disp_path, disp.str());
  stats.outputs.push_back(disp_path);
  return stats;
}

RunStats Pipeline::cmd_eval() {
  if (!config_.eval_dev || config_.eval_dev->scores_path.empty())
    raise(Errc::BadConfig, "eval requires eval.dev and eval.dev_scores");
  if (config_.eval_targets.empty()) raise(Errc::BadConfig, "eval requires at least one eval.target");
  RunStats stats;

  ScoreSet dev;
  dev.database = corpus_display(config_.eval_dev->corpus_key);
  dev.subset = config_.eval_dev->subset;
  dev.manifest = &manifest(config_.eval_dev->corpus_key);
  dev.scores = read_score_file(config_.eval_dev->scores_path);

  std::vector<ScoreSet> targets;
  for (const EvalTargetSpec& t : config_.eval_targets) {
    ScoreSet s;
    s.database = corpus_display(t.corpus_key);
    s.subset = t.subset;
    s.manifest = &manifest(t.corpus_key);
    s.scores = read_score_file(t.scores_path);
    targets.push_back(std::move(s));
  }

  const EvalReport report = evaluate(dev, targets, config_.eval);

  const auto header = provenance_header();
  export_eval_tsv(report, reports_dir_ / "eval.tsv", header);
  std::map<std::string, std::string> prov;
  prov["toolkit_version"] = kVersion;
  prov["config_hash"] = config_hash_;
  export_eval_json(report, reports_dir_ / "eval.json", prov);
  stats.outputs.push_back(reports_dir_ / "eval.tsv");
  stats.outputs.push_back(reports_dir_ / "eval.json");
  return stats;
}

RunStats Pipeline::report_all() {
  RunStats stats;
  if (!config_.pmf_selections.empty()) stats.merge(cmd_pmf());
  if (!config_.comparisons.empty()) stats.merge(cmd_compare());
  if (config_.fit_selection) stats.merge(cmd_embed_project());
  if (config_.eval_dev && !config_.eval_targets.empty()) stats.merge(cmd_eval());
  return stats;
}

}  // namespace wavepmf
