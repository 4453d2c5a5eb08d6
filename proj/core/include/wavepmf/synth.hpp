// core/include/wavepmf/synth.hpp

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

#include <cstdint>
#include <filesystem>
#include <string>

#include "wavepmf/audio.hpp"

namespace wavepmf {

// Toy corpus generator: Laplacian-amplitude noise utterances with a full
// manifest, for smoke tests and pipeline demos on machines without the
// licensed corpora. The amplitude scale is the knob that separates
// "generators" statistically.
struct SynthSpec {
  std::string corpus_name = "synth";
  int sample_rate = 16000;
  double duration_seconds = 2.0;
  int utterances_per_class_per_subset = 10;
  double bonafide_scale = 1500.0;
  double spoof_scale = 2500.0;
  std::uint64_t seed = 1;
  double eval_codec_fraction = 0.0;  // tag this fraction of eval records with a codec name
};

// Laplace(0, scale) samples, rounded and saturated to int16.
SampleBuffer synth_utterance(int sample_rate, double duration_seconds, double scale,
                             std::uint64_t seed, std::uint64_t stream);

// Writes WAV files plus manifest.tsv under dir; returns the manifest path.
std::filesystem::path generate_synthetic_corpus(const SynthSpec& spec,
                                                const std::filesystem::path& dir);

}  // namespace wavepmf
