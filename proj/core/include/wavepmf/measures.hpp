// core/include/wavepmf/measures.hpp

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

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "wavepmf/pmf.hpp"

namespace wavepmf {

// Fixed battery; the embedding consumes all eight in this order.
// The first three are the headline measures of the comparison reports.
enum class MeasureId {
  SymmetricKL = 0,
  ModifiedKS,
  Hellinger,
  JensenShannon,
  QuadraticChi,
  NccDissimilarity,
  Bhattacharyya,
  TotalVariation,
};

inline constexpr std::size_t kMeasureCount = 8;

constexpr std::array<MeasureId, kMeasureCount> kAllMeasures = {
    MeasureId::SymmetricKL,   MeasureId::ModifiedKS,       MeasureId::Hellinger,
    MeasureId::JensenShannon, MeasureId::QuadraticChi,     MeasureId::NccDissimilarity,
    MeasureId::Bhattacharyya, MeasureId::TotalVariation,
};

const char* measure_name(MeasureId m);
std::optional<MeasureId> measure_from_name(std::string_view name);

struct MeasureValue {
  MeasureId measure;
  double value;  // nats for the KL family, dimensionless otherwise
};

// How a "Symmetric KL" number is reported: arithmetic mean of the two
// directed divergences (default), or their sum.
enum class SymKlConvention { Mean, Sum };

// All pairwise measures require p.size() == q.size(); the KL family
// additionally requires strictly positive support of the denominator
// distribution (callers smooth first) and raises NonPositiveSupport
// otherwise.
double directed_kl(std::span<const double> p, std::span<const double> q);
double symmetric_kl(std::span<const double> p, std::span<const double> q,
                    SymKlConvention convention = SymKlConvention::Mean);
double modified_ks(std::span<const double> p, std::span<const double> q);
double hellinger(std::span<const double> p, std::span<const double> q);
double jensen_shannon(std::span<const double> p, std::span<const double> q);
double quadratic_chi(std::span<const double> p, std::span<const double> q);
double ncc_dissimilarity(std::span<const double> p, std::span<const double> q);
double bhattacharyya(std::span<const double> p, std::span<const double> q);
double total_variation(std::span<const double> p, std::span<const double> q);

// Evaluates one measure by id, applying `epsilon` smoothing to both inputs
// first when the measure is in the KL family (SymmetricKL, JensenShannon,
// Bhattacharyya). The other measures always see the raw PMFs.
MeasureValue compute_measure(MeasureId id, const Pmf& p, const Pmf& q, double epsilon,
                             SymKlConvention convention = SymKlConvention::Mean);

// The eight measures in MeasureId order.
std::array<MeasureValue, kMeasureCount> measure_all(const Pmf& p, const Pmf& q, double epsilon);

bool is_kl_family(MeasureId m);

}  // namespace wavepmf
