// core/src/audio.cpp

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

#include "wavepmf/audio.hpp"

#include <cstring>
#include <fstream>

#include "wavepmf/errors.hpp"

namespace wavepmf {

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open audio file: " + path.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) raise(Errc::IoError, "read failure: " + path.string());
  return data;
}

std::uint32_t le32(const std::vector<std::uint8_t>& d, std::size_t off) {
  return static_cast<std::uint32_t>(d[off]) | (static_cast<std::uint32_t>(d[off + 1]) << 8) |
         (static_cast<std::uint32_t>(d[off + 2]) << 16) |
         (static_cast<std::uint32_t>(d[off + 3]) << 24);
}

std::uint16_t le16(const std::vector<std::uint8_t>& d, std::size_t off) {
  return static_cast<std::uint16_t>(static_cast<std::uint16_t>(d[off]) |
                                    (static_cast<std::uint16_t>(d[off + 1]) << 8));
}

}  // namespace

SampleBuffer decode_wav_bytes(const std::vector<std::uint8_t>& data, const std::string& origin) {
  if (data.size() < 44 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    raise(Errc::UnsupportedFormat, origin + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_off = 0, data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    char id[4];
    std::memcpy(id, data.data() + pos, 4);
    const std::uint32_t len = le32(data, pos + 4);
    const std::size_t body = pos + 8;
    if (body + len > data.size()) raise(Errc::IoError, origin + ": truncated chunk");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) raise(Errc::UnsupportedFormat, origin + ": short fmt chunk");
      format = le16(data, body);
      channels = le16(data, body + 2);
      rate = le32(data, body + 4);
      bits = le16(data, body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_off == 0) raise(Errc::UnsupportedFormat, origin + ": missing fmt or data chunk");
  if (format != 1)  // PCM only; no float, no extensible
    raise(Errc::UnsupportedFormat, origin + ": WAV format tag " + std::to_string(format) + " (need PCM)");
  if (channels != 1)
    raise(Errc::UnsupportedFormat, origin + ": " + std::to_string(channels) + " channels (need mono)");
  if (bits != 16)
    raise(Errc::UnsupportedFormat, origin + ": " + std::to_string(bits) + "-bit samples (need 16)");
  if (rate == 0) raise(Errc::UnsupportedFormat, origin + ": zero sample rate");
  if (data_len < 2) raise(Errc::EmptyAudio, origin + ": no samples");

  SampleBuffer buf;
  buf.sample_rate = static_cast<int>(rate);
  const std::size_t n = data_len / 2;
  buf.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    buf.samples[i] = static_cast<std::int16_t>(le16(data, data_off + 2 * i));
  return buf;
}

SampleBuffer decode_audio(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> data = read_file(path);
  if (data.size() >= 4 && std::memcmp(data.data(), "RIFF", 4) == 0)
    return decode_wav_bytes(data, path.string());
  if (data.size() >= 4 && std::memcmp(data.data(), "fLaC", 4) == 0)
    return decode_flac_bytes(data, path.string());
  raise(Errc::UnsupportedFormat, path.string() + ": unrecognized container (need WAV or FLAC)");
}

void write_wav(const std::filesystem::path& path, const SampleBuffer& buffer) {
  if (buffer.samples.empty()) raise(Errc::EmptyBuffer, "refusing to write empty WAV");
  if (buffer.sample_rate <= 0) raise(Errc::UnsupportedFormat, "bad sample rate");
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open for writing: " + path.string());

  auto w16 = [&](std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
    out.write(b, 2);
  };
  auto w32 = [&](std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                 static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out.write(b, 4);
  };

  const std::uint32_t data_len = static_cast<std::uint32_t>(buffer.samples.size() * 2);
  const std::uint32_t rate = static_cast<std::uint32_t>(buffer.sample_rate);
  out.write("RIFF", 4);
  w32(36 + data_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  w32(16);
  w16(1);   // PCM
  w16(1);   // mono
  w32(rate);
  w32(rate * 2);  // byte rate
  w16(2);   // block align
  w16(16);  // bits
  out.write("data", 4);
  w32(data_len);
  for (std::int16_t s : buffer.samples) w16(static_cast<std::uint16_t>(s));
  if (!out) raise(Errc::IoError, "short write: " + path.string());
}

}  // namespace wavepmf
