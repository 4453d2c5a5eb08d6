// core/src/synth.cpp

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

#include "wavepmf/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "wavepmf/corpus.hpp"
#include "wavepmf/errors.hpp"
#include "wavepmf/rng.hpp"

namespace wavepmf {

SampleBuffer synth_utterance(int sample_rate, double duration_seconds, double scale,
                             std::uint64_t seed, std::uint64_t stream) {
  if (sample_rate <= 0 || duration_seconds <= 0.0 || scale <= 0.0)
    raise(Errc::InvalidSpec, "bad synth parameters");
  SampleBuffer buf;
  buf.sample_rate = sample_rate;
  const std::size_t n = static_cast<std::size_t>(sample_rate * duration_seconds);
  buf.samples.resize(n);
  Rng rng = Rng::derive(seed, stream);
  for (std::size_t i = 0; i < n; ++i) {
    // Laplace by inverse CDF
    const double u = rng.next_double() - 0.5;
    const double mag = -scale * std::log(1.0 - 2.0 * std::fabs(u));
    double v = u < 0.0 ? -mag : mag;
    if (v > 32767.0) v = 32767.0;
    if (v < -32768.0) v = -32768.0;
    buf.samples[i] = static_cast<std::int16_t>(std::llround(v));
  }
  return buf;
}

std::filesystem::path generate_synthetic_corpus(const SynthSpec& spec,
                                                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "wav");
  const std::filesystem::path manifest_path = dir / "manifest.tsv";
  std::ofstream manifest(manifest_path, std::ios::binary);
  if (!manifest) raise(Errc::IoError, "cannot open for writing: " + manifest_path.string());

  manifest << "#%corpus_name " << spec.corpus_name << "\n";
  manifest << "#%sample_rate " << spec.sample_rate << "\n";

  const Subset subsets[3] = {Subset::Train, Subset::Dev, Subset::Eval};
  const Label labels[2] = {Label::BonaFide, Label::Spoof};
  std::uint64_t stream = 0;
  for (Subset subset : subsets) {
    for (Label label : labels) {
      const double scale = label == Label::BonaFide ? spec.bonafide_scale : spec.spoof_scale;
      for (int i = 0; i < spec.utterances_per_class_per_subset; ++i, ++stream) {
        char utt[64];
        std::snprintf(utt, sizeof(utt), "%s_%s_%s_%04d", spec.corpus_name.c_str(),
                      subset_name(subset), label_name(label), i);
        const std::string wav_rel = std::string("wav/") + utt + ".wav";
        const SampleBuffer buf =
            synth_utterance(spec.sample_rate, spec.duration_seconds, scale, spec.seed, stream);
        write_wav(dir / wav_rel, buf);

        const char* gender = i % 2 == 0 ? "m" : "f";
        char speaker[32];
        std::snprintf(speaker, sizeof(speaker), "spk_%s_%02d", subset_name(subset), i % 5);
        const bool coded = subset == Subset::Eval &&
                           spec.eval_codec_fraction > 0.0 &&
                           static_cast<double>(i % 100) < spec.eval_codec_fraction * 100.0;
        const char* codec = coded ? "opus" : "none";
        const char* attack = label == Label::Spoof ? "A01" : "-";
        manifest << utt << '\t' << wav_rel << '\t' << subset_name(subset) << '\t'
                 << label_name(label) << '\t' << speaker << '\t' << gender << '\t' << codec
                 << '\t' << attack << '\n';
      }
    }
  }
  if (!manifest) raise(Errc::IoError, "short write: " + manifest_path.string());
  return manifest_path;
}

}  // namespace wavepmf
