// tools/wavepmf.cpp

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

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "wavepmf/errors.hpp"
#include "wavepmf/pipeline.hpp"
#include "wavepmf/synth.hpp"
#include "wavepmf/version.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  unsigned workers = 0;  // 0: keep config value
  bool all_measures = false;
  bool kl_sum = false;
  bool mean_weighting = false;
};

wavepmf::RunConfig load_config(const CommonOpts& opts) {
  wavepmf::RunConfig cfg = wavepmf::parse_run_config(opts.config_path);
  if (opts.workers > 0) cfg.workers = opts.workers;
  if (opts.all_measures) cfg.all_measures = true;
  if (opts.kl_sum) cfg.kl_convention = wavepmf::SymKlConvention::Sum;
  if (opts.mean_weighting) cfg.weighting = wavepmf::PmfWeighting::PerUtteranceMean;
  cfg.eval.workers = cfg.workers;
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-c,--config", opts.config_path, "Run configuration file")->required();
  cmd->add_option("--workers", opts.workers, "Worker threads (0 = config value)");
  cmd->add_flag("--all-measures", opts.all_measures, "Emit all 8 measures in compare rows");
  cmd->add_flag("--kl-sum", opts.kl_sum, "Report Symmetric KL as the sum of directed KLs");
  cmd->add_flag("--mean-weighting", opts.mean_weighting,
                "Average per-utterance PMFs instead of pooling samples");
}

void print_stats(const wavepmf::RunStats& stats) {
  std::printf("cache: %zu hit(s), %zu miss(es); %zu output file(s)\n", stats.cache_hits,
              stats.cache_misses, stats.outputs.size());
  for (const auto& p : stats.outputs) std::printf("  %s\n", p.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("wavepmf ") + wavepmf::kVersion +
               " - waveform-PMF corpus assessment toolkit"};
  app.require_subcommand(1);

  CommonOpts pmf_opts, compare_opts, embed_opts, eval_opts, all_opts;
  CLI::App* cmd_pmf = app.add_subcommand("pmf", "Emit class PMF artifacts per declared selection");
  add_common(cmd_pmf, pmf_opts);
  CLI::App* cmd_compare =
      app.add_subcommand("compare", "Similarity measures between declared selection pairs");
  add_common(cmd_compare, compare_opts);
  CLI::App* cmd_embed = app.add_subcommand(
      "embed-project", "Build references, embed selections, fit UMAP, emit point clouds");
  add_common(cmd_embed, embed_opts);
  CLI::App* cmd_eval =
      app.add_subcommand("eval", "EER threshold on dev scores + stratified miss-rate report");
  add_common(cmd_eval, eval_opts);
  std::string eval_dev_scores, eval_target_scores;
  cmd_eval->add_option("--dev-scores", eval_dev_scores, "Override eval.dev_scores path");
  CLI::App* cmd_all = app.add_subcommand("report-all", "Run the full pipeline");
  add_common(cmd_all, all_opts);

  CLI::App* cmd_synth =
      app.add_subcommand("synth", "Generate a synthetic Laplacian-noise corpus for smoke tests");
  std::string synth_out = "synth_corpus", synth_name = "synth";
  int synth_n = 10, synth_rate = 16000;
  double synth_dur = 2.0, synth_bona = 1500.0, synth_spoof = 2500.0, synth_codec_frac = 0.0;
  std::uint64_t synth_seed = 1;
  cmd_synth->add_option("-o,--out", synth_out, "Output directory");
  cmd_synth->add_option("--name", synth_name, "Corpus name");
  cmd_synth->add_option("-n,--per-class", synth_n, "Utterances per class per subset");
  cmd_synth->add_option("--sample-rate", synth_rate, "Sample rate");
  cmd_synth->add_option("--duration", synth_dur, "Utterance duration in seconds");
  cmd_synth->add_option("--bonafide-scale", synth_bona, "Laplace scale for bona fide");
  cmd_synth->add_option("--spoof-scale", synth_spoof, "Laplace scale for spoof");
  cmd_synth->add_option("--seed", synth_seed, "Generator seed");
  cmd_synth->add_option("--eval-codec-fraction", synth_codec_frac,
                        "Fraction of eval records tagged with a codec");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_synth->parsed()) {
      wavepmf::SynthSpec spec;
      spec.corpus_name = synth_name;
      spec.sample_rate = synth_rate;
      spec.duration_seconds = synth_dur;
      spec.utterances_per_class_per_subset = synth_n;
      spec.bonafide_scale = synth_bona;
      spec.spoof_scale = synth_spoof;
      spec.seed = synth_seed;
      spec.eval_codec_fraction = synth_codec_frac;
      const auto manifest = wavepmf::generate_synthetic_corpus(spec, synth_out);
      std::printf("wrote %s\n", manifest.string().c_str());
      return 0;
    }

    CommonOpts* opts = nullptr;
    if (cmd_pmf->parsed()) opts = &pmf_opts;
    else if (cmd_compare->parsed()) opts = &compare_opts;
    else if (cmd_embed->parsed()) opts = &embed_opts;
    else if (cmd_eval->parsed()) opts = &eval_opts;
    else opts = &all_opts;

    wavepmf::RunConfig cfg = load_config(*opts);
    if (cmd_eval->parsed() && !eval_dev_scores.empty()) {
      if (!cfg.eval_dev) cfg.eval_dev.emplace();
      cfg.eval_dev->scores_path = eval_dev_scores;
    }

    wavepmf::Pipeline pipeline(std::move(cfg));
    wavepmf::RunStats stats;
    if (cmd_pmf->parsed()) stats = pipeline.cmd_pmf();
    else if (cmd_compare->parsed()) stats = pipeline.cmd_compare();
    else if (cmd_embed->parsed()) stats = pipeline.cmd_embed_project();
    else if (cmd_eval->parsed()) stats = pipeline.cmd_eval();
    else stats = pipeline.report_all();
    print_stats(stats);
    return 0;
  } catch (const wavepmf::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: Internal: %s\n", e.what());
    return 1;
  }
}
