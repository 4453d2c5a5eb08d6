// core/include/wavepmf/audio.hpp

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
#include <vector>

namespace wavepmf {

// Raw signed 16-bit amplitudes. Decoding never normalizes, dithers, or
// resamples; the integer values are the measurand.
struct SampleBuffer {
  std::vector<std::int16_t> samples;
  int sample_rate = 0;
};

// Decodes a 16-bit mono WAV or FLAC file (container picked by magic bytes,
// not extension). Anything else raises UnsupportedFormat.
SampleBuffer decode_audio(const std::filesystem::path& path);

// 16-bit PCM mono WAV writer (used by the synthetic-corpus generator).
void write_wav(const std::filesystem::path& path, const SampleBuffer& buffer);

// Internal: decoders for each accepted container; data is the whole file.
SampleBuffer decode_wav_bytes(const std::vector<std::uint8_t>& data, const std::string& origin);
SampleBuffer decode_flac_bytes(const std::vector<std::uint8_t>& data, const std::string& origin);

}  // namespace wavepmf
