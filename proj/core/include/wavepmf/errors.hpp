// core/include/wavepmf/errors.hpp

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

#include <stdexcept>
#include <string>

namespace wavepmf {

// One code per contract error a caller may want to distinguish.
enum class Errc {
  // corpus-io
  MalformedLine,
  DuplicateUttId,
  UnknownToken,
  UnsupportedFormat,
  IoError,
  EmptyAudio,
  // pmf-core
  EmptyBuffer,
  EmptyHistogram,
  EmptySelection,
  // similarity
  DimensionMismatch,
  NonPositiveSupport,
  // filterbank
  InvalidSpec,
  // projection
  TooFewPoints,
  DegenerateDistances,
  NotFitted,
  EmptyInput,
  // detection-eval
  EmptyScores,
  EmptyOutcomes,
  JoinFailure,
  EmptyGroup,
  // report-cli
  BadConfig,
  BadFile,
};

constexpr const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::DuplicateUttId: return "DuplicateUttId";
    case Errc::UnknownToken: return "UnknownToken";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::IoError: return "IoError";
    case Errc::EmptyAudio: return "EmptyAudio";
    case Errc::EmptyBuffer: return "EmptyBuffer";
    case Errc::EmptyHistogram: return "EmptyHistogram";
    case Errc::EmptySelection: return "EmptySelection";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonPositiveSupport: return "NonPositiveSupport";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::DegenerateDistances: return "DegenerateDistances";
    case Errc::NotFitted: return "NotFitted";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::EmptyScores: return "EmptyScores";
    case Errc::EmptyOutcomes: return "EmptyOutcomes";
    case Errc::JoinFailure: return "JoinFailure";
    case Errc::EmptyGroup: return "EmptyGroup";
    case Errc::BadConfig: return "BadConfig";
    case Errc::BadFile: return "BadFile";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace wavepmf
