// core/src/flac.cpp

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

// Decode-only FLAC reader covering the subset this toolkit accepts:
// 16-bit mono streams with CONSTANT / VERBATIM / FIXED / LPC subframes and
// Rice or Rice2 residual coding. Header CRC-8 and frame CRC-16 are verified.

#include <cstdint>
#include <string>
#include <vector>

#include "wavepmf/audio.hpp"
#include "wavepmf/errors.hpp"

namespace wavepmf {

namespace {

class BitReader {
 public:
  BitReader(const std::vector<std::uint8_t>& data, const std::string& origin)
      : data_(data), origin_(origin) {}

  std::size_t byte_pos() const { return byte_; }
  bool aligned() const { return bit_ == 0; }
  bool exhausted() const { return byte_ >= data_.size(); }
  std::size_t bytes_left() const { return data_.size() - byte_; }

  void seek_byte(std::size_t pos) {
    byte_ = pos;
    bit_ = 0;
  }

  std::uint64_t read_bits(unsigned n) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < n; ++i) v = (v << 1) | read_bit();
    return v;
  }

  std::int64_t read_signed(unsigned n) {
    std::uint64_t v = read_bits(n);
    if (n > 0 && (v >> (n - 1)) & 1) v |= ~((std::uint64_t(1) << n) - 1);
    return static_cast<std::int64_t>(v);
  }

  unsigned read_unary() {
    unsigned count = 0;
    while (read_bit() == 0) ++count;
    return count;
  }

  void align() { if (bit_ != 0) { bit_ = 0; ++byte_; } }

 private:
  std::uint32_t read_bit() {
    if (byte_ >= data_.size()) raise(Errc::IoError, origin_ + ": truncated FLAC stream");
    std::uint32_t b = (data_[byte_] >> (7 - bit_)) & 1;
    if (++bit_ == 8) { bit_ = 0; ++byte_; }
    return b;
  }

  const std::vector<std::uint8_t>& data_;
  const std::string& origin_;
  std::size_t byte_ = 0;
  unsigned bit_ = 0;
};

std::uint8_t crc8(const std::uint8_t* data, std::size_t len) {
  std::uint8_t crc = 0;
  for (std::size_t i = 0; i < len; ++i) {
    crc ^= data[i];
    for (int b = 0; b < 8; ++b) crc = (crc & 0x80) ? static_cast<std::uint8_t>((crc << 1) ^ 0x07) : static_cast<std::uint8_t>(crc << 1);
  }
  return crc;
}

std::uint16_t crc16(const std::uint8_t* data, std::size_t len) {
  std::uint16_t crc = 0;
  for (std::size_t i = 0; i < len; ++i) {
    crc ^= static_cast<std::uint16_t>(data[i]) << 8;
    for (int b = 0; b < 8; ++b)
      crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x8005) : static_cast<std::uint16_t>(crc << 1);
  }
  return crc;
}

// UTF-8-style extended coded number (frame/sample index); value is only
// needed for validation so we just consume it.
void skip_coded_number(BitReader& br, const std::string& origin) {
  std::uint64_t b0 = br.read_bits(8);
  if ((b0 & 0x80) == 0) return;
  unsigned ones = 0;
  for (std::uint64_t m = 0x80; m != 0 && (b0 & m); m >>= 1) ++ones;
  if (ones < 2 || ones > 7) raise(Errc::IoError, origin + ": bad coded number");
  for (unsigned i = 0; i + 1 < ones; ++i) {
    std::uint64_t c = br.read_bits(8);
    if ((c & 0xC0) != 0x80) raise(Errc::IoError, origin + ": bad coded number continuation");
  }
}

struct StreamInfo {
  unsigned sample_rate = 0;
  unsigned channels = 0;
  unsigned bits_per_sample = 0;
  std::uint64_t total_samples = 0;
};

// Residual for one subframe; outputs into samples[order..blocksize).
void read_residual(BitReader& br, const std::string& origin, unsigned order, unsigned blocksize,
                   std::vector<std::int64_t>& out) {
  const unsigned method = static_cast<unsigned>(br.read_bits(2));
  if (method > 1) raise(Errc::UnsupportedFormat, origin + ": reserved residual coding method");
  const unsigned param_bits = method == 0 ? 4 : 5;
  const unsigned escape = method == 0 ? 0xF : 0x1F;
  const unsigned partition_order = static_cast<unsigned>(br.read_bits(4));
  const unsigned partitions = 1u << partition_order;
  if (blocksize % partitions != 0)
    raise(Errc::IoError, origin + ": block size not divisible by partition count");
  const unsigned part_len = blocksize >> partition_order;
  if (part_len <= order && partitions == 1)
    raise(Errc::IoError, origin + ": partition shorter than predictor order");

  std::size_t idx = order;
  for (unsigned p = 0; p < partitions; ++p) {
    const unsigned count = part_len - (p == 0 ? order : 0);
    const unsigned param = static_cast<unsigned>(br.read_bits(param_bits));
    if (param == escape) {
      const unsigned raw_bits = static_cast<unsigned>(br.read_bits(5));
      for (unsigned i = 0; i < count; ++i)
        out[idx++] = raw_bits == 0 ? 0 : br.read_signed(raw_bits);
    } else {
      for (unsigned i = 0; i < count; ++i) {
        const std::uint64_t q = br.read_unary();
        const std::uint64_t r = param == 0 ? 0 : br.read_bits(param);
        const std::uint64_t u = (q << param) | r;
        out[idx++] = static_cast<std::int64_t>(u >> 1) ^ -static_cast<std::int64_t>(u & 1);
      }
    }
  }
}

void restore_fixed(unsigned order, std::vector<std::int64_t>& s) {
  for (std::size_t i = order; i < s.size(); ++i) {
    switch (order) {
      case 0: break;
      case 1: s[i] += s[i - 1]; break;
      case 2: s[i] += 2 * s[i - 1] - s[i - 2]; break;
      case 3: s[i] += 3 * s[i - 1] - 3 * s[i - 2] + s[i - 3]; break;
      case 4: s[i] += 4 * s[i - 1] - 6 * s[i - 2] + 4 * s[i - 3] - s[i - 4]; break;
      default: break;
    }
  }
}

}  // namespace

SampleBuffer decode_flac_bytes(const std::vector<std::uint8_t>& data, const std::string& origin) {
  if (data.size() < 42 || data[0] != 'f' || data[1] != 'L' || data[2] != 'a' || data[3] != 'C')
    raise(Errc::UnsupportedFormat, origin + ": not a FLAC stream");

  BitReader br(data, origin);
  br.seek_byte(4);

  // metadata blocks
  StreamInfo info;
  bool have_streaminfo = false;
  bool last = false;
  while (!last) {
    last = br.read_bits(1) != 0;
    const unsigned type = static_cast<unsigned>(br.read_bits(7));
    const std::size_t len = static_cast<std::size_t>(br.read_bits(24));
    if (type == 0) {
      if (len != 34) raise(Errc::IoError, origin + ": bad STREAMINFO length");
      br.read_bits(16);  // min blocksize
      br.read_bits(16);  // max blocksize
      br.read_bits(24);  // min framesize
      br.read_bits(24);  // max framesize
      info.sample_rate = static_cast<unsigned>(br.read_bits(20));
      info.channels = static_cast<unsigned>(br.read_bits(3)) + 1;
      info.bits_per_sample = static_cast<unsigned>(br.read_bits(5)) + 1;
      info.total_samples = br.read_bits(36);
      br.read_bits(64);  // md5 (unchecked)
      br.read_bits(64);
      have_streaminfo = true;
    } else {
      if (br.bytes_left() < len) raise(Errc::IoError, origin + ": truncated metadata block");
      br.seek_byte(br.byte_pos() + len);
    }
  }
  if (!have_streaminfo) raise(Errc::IoError, origin + ": missing STREAMINFO");
  if (info.channels != 1)
    raise(Errc::UnsupportedFormat,
          origin + ": " + std::to_string(info.channels) + " channels (need mono)");
  if (info.bits_per_sample != 16)
    raise(Errc::UnsupportedFormat,
          origin + ": " + std::to_string(info.bits_per_sample) + "-bit samples (need 16)");
  if (info.sample_rate == 0) raise(Errc::UnsupportedFormat, origin + ": zero sample rate");

  static constexpr unsigned kRateTable[12] = {0,     88200, 176400, 192000, 8000,  16000,
                                              22050, 24000, 32000,  44100,  48000, 96000};

  SampleBuffer buf;
  buf.sample_rate = static_cast<int>(info.sample_rate);
  if (info.total_samples > 0) buf.samples.reserve(static_cast<std::size_t>(info.total_samples));

  while (true) {
    if (info.total_samples > 0 && buf.samples.size() >= info.total_samples) break;
    if (br.bytes_left() < 2) {
      if (info.total_samples > 0 && buf.samples.size() < info.total_samples)
        raise(Errc::IoError, origin + ": stream ends before declared sample count");
      break;
    }

    const std::size_t frame_start = br.byte_pos();
    if (br.read_bits(14) != 0x3FFE) raise(Errc::IoError, origin + ": lost frame sync");
    if (br.read_bits(1) != 0) raise(Errc::IoError, origin + ": reserved frame bit set");
    br.read_bits(1);  // blocking strategy
    const unsigned bs_code = static_cast<unsigned>(br.read_bits(4));
    const unsigned sr_code = static_cast<unsigned>(br.read_bits(4));
    const unsigned chan_code = static_cast<unsigned>(br.read_bits(4));
    const unsigned ss_code = static_cast<unsigned>(br.read_bits(3));
    if (br.read_bits(1) != 0) raise(Errc::IoError, origin + ": reserved frame bit set");
    skip_coded_number(br, origin);

    unsigned blocksize = 0;
    switch (bs_code) {
      case 0: raise(Errc::IoError, origin + ": reserved block size code");
      case 1: blocksize = 192; break;
      case 6: blocksize = static_cast<unsigned>(br.read_bits(8)) + 1; break;
      case 7: blocksize = static_cast<unsigned>(br.read_bits(16)) + 1; break;
      default:
        blocksize = bs_code <= 5 ? 576u << (bs_code - 2) : 256u << (bs_code - 8);
        break;
    }

    unsigned frame_rate = info.sample_rate;
    if (sr_code == 12) frame_rate = static_cast<unsigned>(br.read_bits(8)) * 1000;
    else if (sr_code == 13) frame_rate = static_cast<unsigned>(br.read_bits(16));
    else if (sr_code == 14) frame_rate = static_cast<unsigned>(br.read_bits(16)) * 10;
    else if (sr_code == 15) raise(Errc::IoError, origin + ": invalid sample rate code");
    else if (sr_code != 0) frame_rate = kRateTable[sr_code];
    if (frame_rate != info.sample_rate)
      raise(Errc::IoError, origin + ": frame sample rate disagrees with STREAMINFO");

    if (chan_code != 0)
      raise(Errc::UnsupportedFormat, origin + ": non-mono channel assignment in frame");

    unsigned bps = info.bits_per_sample;
    switch (ss_code) {
      case 0: break;
      case 1: bps = 8; break;
      case 2: bps = 12; break;
      case 4: bps = 16; break;
      case 5: bps = 20; break;
      case 6: bps = 24; break;
      case 7: bps = 32; break;
      default: raise(Errc::IoError, origin + ": reserved sample size code");
    }
    if (bps != 16) raise(Errc::UnsupportedFormat, origin + ": frame is not 16-bit");

    const std::size_t header_end = br.byte_pos();
    const std::uint8_t expect_crc8 = static_cast<std::uint8_t>(br.read_bits(8));
    if (crc8(data.data() + frame_start, header_end - frame_start) != expect_crc8)
      raise(Errc::IoError, origin + ": frame header CRC mismatch");

    // single (mono) subframe
    if (br.read_bits(1) != 0) raise(Errc::IoError, origin + ": bad subframe padding bit");
    const unsigned type = static_cast<unsigned>(br.read_bits(6));
    unsigned wasted = 0;
    if (br.read_bits(1) != 0) wasted = br.read_unary() + 1;
    if (wasted >= bps) raise(Errc::IoError, origin + ": wasted bits exceed sample size");
    const unsigned eff_bps = bps - wasted;

    std::vector<std::int64_t> block(blocksize, 0);
    if (type == 0) {  // CONSTANT
      const std::int64_t v = br.read_signed(eff_bps);
      for (auto& s : block) s = v;
    } else if (type == 1) {  // VERBATIM
      for (auto& s : block) s = br.read_signed(eff_bps);
    } else if ((type & 0x38) == 0x08 && (type & 0x07) <= 4) {  // FIXED
      const unsigned order = type & 0x07;
      if (order > blocksize) raise(Errc::IoError, origin + ": predictor order exceeds block");
      for (unsigned i = 0; i < order; ++i) block[i] = br.read_signed(eff_bps);
      read_residual(br, origin, order, blocksize, block);
      restore_fixed(order, block);
    } else if (type & 0x20) {  // LPC
      const unsigned order = (type & 0x1F) + 1;
      if (order > blocksize) raise(Errc::IoError, origin + ": predictor order exceeds block");
      for (unsigned i = 0; i < order; ++i) block[i] = br.read_signed(eff_bps);
      const unsigned precision = static_cast<unsigned>(br.read_bits(4)) + 1;
      if (precision == 16) raise(Errc::IoError, origin + ": invalid qlp precision");
      const int shift = static_cast<int>(br.read_signed(5));
      if (shift < 0) raise(Errc::IoError, origin + ": negative qlp shift");
      std::vector<std::int64_t> coef(order);
      for (auto& c : coef) c = br.read_signed(precision);
      read_residual(br, origin, order, blocksize, block);
      for (std::size_t i = order; i < block.size(); ++i) {
        std::int64_t pred = 0;
        for (unsigned j = 0; j < order; ++j) pred += coef[j] * block[i - 1 - j];
        block[i] += pred >> shift;
      }
    } else {
      raise(Errc::UnsupportedFormat, origin + ": reserved subframe type");
    }

    br.align();
    const std::size_t frame_end = br.byte_pos();
    const std::uint16_t expect_crc16 = static_cast<std::uint16_t>(br.read_bits(16));
    if (crc16(data.data() + frame_start, frame_end - frame_start) != expect_crc16)
      raise(Errc::IoError, origin + ": frame CRC mismatch");

    for (std::int64_t s : block) {
      const std::int64_t v = s << wasted;
      if (v < -32768 || v > 32767) raise(Errc::IoError, origin + ": decoded sample out of range");
      buf.samples.push_back(static_cast<std::int16_t>(v));
    }
  }

  if (info.total_samples > 0 && buf.samples.size() > info.total_samples)
    buf.samples.resize(static_cast<std::size_t>(info.total_samples));
  if (buf.samples.empty()) raise(Errc::EmptyAudio, origin + ": no samples");
  return buf;
}

}  // namespace wavepmf
