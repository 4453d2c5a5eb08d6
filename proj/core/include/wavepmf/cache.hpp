// core/include/wavepmf/cache.hpp

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

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace wavepmf {

std::string sha256_hex(std::string_view data);
std::string sha256_hex_file(const std::filesystem::path& path);

// Content-addressed object store under <root>/objects/<aa>/<hash>.
// Writes are atomic (tmp + rename); keys are caller-built canonical strings
// hashed with SHA-256.
class ContentCache {
 public:
  explicit ContentCache(std::filesystem::path root);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, std::string_view bytes) const;

  std::size_t hits() const { return hits_.load(); }
  std::size_t misses() const { return misses_.load(); }

 private:
  std::filesystem::path object_path(const std::string& key) const;

  std::filesystem::path root_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

}  // namespace wavepmf
