// core/src/cache.cpp

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

#include "wavepmf/cache.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "wavepmf/errors.hpp"

namespace wavepmf {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    raise(Errc::IoError, "sha256 digest failure");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_hex_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

ContentCache::ContentCache(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_ / "objects");
}

std::filesystem::path ContentCache::object_path(const std::string& key) const {
  const std::string h = sha256_hex(key);
  return root_ / "objects" / h.substr(0, 2) / h.substr(2);
}

std::optional<std::string> ContentCache::get(const std::string& key) const {
  const std::filesystem::path p = object_path(key);
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    ++misses_;
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  ++hits_;
  return ss.str();
}

void ContentCache::put(const std::string& key, std::string_view bytes) const {
  const std::filesystem::path p = object_path(key);
  std::filesystem::create_directories(p.parent_path());
  const std::filesystem::path tmp = p.parent_path() / (p.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) raise(Errc::IoError, "cannot open cache temp file: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) raise(Errc::IoError, "short cache write: " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

}  // namespace wavepmf
