// core/src/measures.cpp

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

#include "wavepmf/measures.hpp"

#include <cmath>

#include "wavepmf/errors.hpp"

namespace wavepmf {

namespace {

void check_dims(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    raise(Errc::DimensionMismatch, "pmf sizes differ: " + std::to_string(p.size()) + " vs " +
                                       std::to_string(q.size()));
  if (p.empty()) raise(Errc::DimensionMismatch, "empty pmfs");
}

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

}  // namespace

const char* measure_name(MeasureId m) {
  switch (m) {
    case MeasureId::SymmetricKL: return "symmetric_kl";
    case MeasureId::ModifiedKS: return "modified_ks";
    case MeasureId::Hellinger: return "hellinger";
    case MeasureId::JensenShannon: return "jensen_shannon";
    case MeasureId::QuadraticChi: return "quadratic_chi";
    case MeasureId::NccDissimilarity: return "ncc_dissimilarity";
    case MeasureId::Bhattacharyya: return "bhattacharyya";
    case MeasureId::TotalVariation: return "total_variation";
  }
  return "?";
}

std::optional<MeasureId> measure_from_name(std::string_view name) {
  for (MeasureId m : kAllMeasures)
    if (name == measure_name(m)) return m;
  return std::nullopt;
}

bool is_kl_family(MeasureId m) {
  return m == MeasureId::SymmetricKL || m == MeasureId::JensenShannon ||
         m == MeasureId::Bhattacharyya;
}

double directed_kl(std::span<const double> p, std::span<const double> q) {
  check_dims(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;  // 0 * ln 0 = 0
    if (q[i] <= 0.0)
      raise(Errc::NonPositiveSupport,
            "KL undefined: q has a zero bin where p is positive (smooth first)");
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return sum;
}

double symmetric_kl(std::span<const double> p, std::span<const double> q,
                    SymKlConvention convention) {
  const double both = directed_kl(p, q) + directed_kl(q, p);
  return convention == SymKlConvention::Mean ? 0.5 * both : both;
}

double modified_ks(std::span<const double> p, std::span<const double> q) {
  check_dims(p, q);
  double cp = 0.0, cq = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cp += p[i];
    cq += q[i];
    const double d = std::fabs(cp - cq);
    if (d > worst) worst = d;
  }
  return clamp01(worst);
}

double hellinger(std::span<const double> p, std::span<const double> q) {
  check_dims(p, q);
  double bc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) bc += std::sqrt(p[i] * q[i]);
  return std::sqrt(clamp01(1.0 - bc));
}

double jensen_shannon(std::span<const double> p, std::span<const double> q) {
  check_dims(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) sum += 0.5 * p[i] * std::log(p[i] / m);
    if (q[i] > 0.0) sum += 0.5 * q[i] * std::log(q[i] / m);
  }
  return sum < 0.0 ? 0.0 : sum;
}

double quadratic_chi(std::span<const double> p, std::span<const double> q) {
  check_dims(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double s = p[i] + q[i];
    if (s == 0.0) continue;
    const double d = p[i] - q[i];
    sum += d * d / s;
  }
  return std::sqrt(sum);
}

double ncc_dissimilarity(std::span<const double> p, std::span<const double> q) {
  check_dims(p, q);
  double dot = 0.0, np = 0.0, nq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dot += p[i] * q[i];
    np += p[i] * p[i];
    nq += q[i] * q[i];
  }
  if (np == 0.0 || nq == 0.0)
    raise(Errc::NonPositiveSupport, "ncc undefined for an all-zero pmf");
  return clamp01(1.0 - dot / (std::sqrt(np) * std::sqrt(nq)));
}

double bhattacharyya(std::span<const double> p, std::span<const double> q) {
  check_dims(p, q);
  double bc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) bc += std::sqrt(p[i] * q[i]);
  if (bc <= 0.0)
    raise(Errc::NonPositiveSupport,
          "Bhattacharyya coefficient is zero (disjoint supports; smooth first)");
  if (bc > 1.0) bc = 1.0;
  return -std::log(bc);
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  check_dims(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::fabs(p[i] - q[i]);
  return clamp01(0.5 * sum);
}

MeasureValue compute_measure(MeasureId id, const Pmf& p, const Pmf& q, double epsilon,
                             SymKlConvention convention) {
  const Pmf* pp = &p;
  const Pmf* qq = &q;
  Pmf sp, sq;
  if (is_kl_family(id) && epsilon > 0.0) {
    sp = smooth(p, epsilon);
    sq = smooth(q, epsilon);
    pp = &sp;
    qq = &sq;
  }
  double v = 0.0;
  switch (id) {
    case MeasureId::SymmetricKL: v = symmetric_kl(pp->probs, qq->probs, convention); break;
    case MeasureId::ModifiedKS: v = modified_ks(pp->probs, qq->probs); break;
    case MeasureId::Hellinger: v = hellinger(pp->probs, qq->probs); break;
    case MeasureId::JensenShannon: v = jensen_shannon(pp->probs, qq->probs); break;
    case MeasureId::QuadraticChi: v = quadratic_chi(pp->probs, qq->probs); break;
    case MeasureId::NccDissimilarity: v = ncc_dissimilarity(pp->probs, qq->probs); break;
    case MeasureId::Bhattacharyya: v = bhattacharyya(pp->probs, qq->probs); break;
    case MeasureId::TotalVariation: v = total_variation(pp->probs, qq->probs); break;
  }
  return {id, v};
}

std::array<MeasureValue, kMeasureCount> measure_all(const Pmf& p, const Pmf& q, double epsilon) {
  // smooth once, not per measure
  Pmf sp, sq;
  const Pmf* pp = &p;
  const Pmf* qq = &q;
  if (epsilon > 0.0) {
    sp = smooth(p, epsilon);
    sq = smooth(q, epsilon);
    pp = &sp;
    qq = &sq;
  }
  std::array<MeasureValue, kMeasureCount> out{};
  for (std::size_t i = 0; i < kMeasureCount; ++i) {
    const MeasureId id = kAllMeasures[i];
    const Pmf& a = is_kl_family(id) ? *pp : p;
    const Pmf& b = is_kl_family(id) ? *qq : q;
    out[i] = compute_measure(id, a, b, 0.0);
  }
  return out;
}

}  // namespace wavepmf
