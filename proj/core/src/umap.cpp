// core/src/umap.cpp

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

#include "wavepmf/umap.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "wavepmf/errors.hpp"
#include "wavepmf/rng.hpp"

namespace wavepmf {

namespace {

constexpr double kSmoothKnnTolerance = 1e-5;
constexpr int kSmoothKnnIterations = 32;
constexpr double kMinSigmaScale = 1e-3;
constexpr double kGradClip = 4.0;

struct Knn {
  std::vector<std::uint32_t> index;  // n x k
  std::vector<double> dist;          // n x k, ascending per row
  std::size_t k = 0;
};

double sq_distance(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

// Exact k nearest neighbors of each query row among the reference rows.
// exclude_diagonal skips j == i (fit-time self match).
Knn brute_force_knn(const std::vector<double>& query, std::size_t n_query,
                    const std::vector<double>& ref, std::size_t n_ref, std::size_t dim,
                    std::size_t k, bool exclude_diagonal, bool* any_positive_distance) {
  Knn knn;
  knn.k = k;
  knn.index.resize(n_query * k);
  knn.dist.resize(n_query * k);
  bool positive = false;
  std::vector<std::pair<double, std::uint32_t>> row;
  row.reserve(n_ref);
  for (std::size_t i = 0; i < n_query; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n_ref; ++j) {
      if (exclude_diagonal && j == i) continue;
      const double d2 = sq_distance(&query[i * dim], &ref[j * dim], dim);
      if (d2 > 0.0) positive = true;
      row.emplace_back(d2, static_cast<std::uint32_t>(j));
    }
    std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), row.end());
    for (std::size_t m = 0; m < k; ++m) {
      knn.index[i * k + m] = row[m].second;
      knn.dist[i * k + m] = std::sqrt(row[m].first);
    }
  }
  if (any_positive_distance) *any_positive_distance = positive;
  return knn;
}

struct Calibration {
  std::vector<double> rho;
  std::vector<double> sigma;
};

// Binary search for the per-point bandwidth such that the sum of fuzzy
// memberships equals log2(k); `implicit_self` adds the unit self-membership
// the fit-time graph carries.
Calibration smooth_knn(const Knn& knn, std::size_t n, double target, bool implicit_self) {
  Calibration cal;
  cal.rho.assign(n, 0.0);
  cal.sigma.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* d = &knn.dist[i * knn.k];
    double rho = 0.0;
    for (std::size_t m = 0; m < knn.k; ++m) {
      if (d[m] > 0.0) {
        rho = d[m];
        break;
      }
    }
    cal.rho[i] = rho;

    double lo = 0.0, hi = std::numeric_limits<double>::infinity(), mid = 1.0;
    for (int it = 0; it < kSmoothKnnIterations; ++it) {
      double psum = implicit_self ? 1.0 : 0.0;
      for (std::size_t m = 0; m < knn.k; ++m) {
        const double gap = d[m] - rho;
        psum += gap > 0.0 ? std::exp(-gap / mid) : 1.0;
      }
      if (std::fabs(psum - target) < kSmoothKnnTolerance) break;
      if (psum > target) {
        hi = mid;
        mid = 0.5 * (lo + hi);
      } else {
        lo = mid;
        mid = std::isinf(hi) ? mid * 2.0 : 0.5 * (lo + hi);
      }
    }

    double mean_d = 0.0;
    for (std::size_t m = 0; m < knn.k; ++m) mean_d += d[m];
    mean_d /= static_cast<double>(knn.k);
    if (mean_d > 0.0 && mid < kMinSigmaScale * mean_d) mid = kMinSigmaScale * mean_d;
    cal.sigma[i] = mid;
  }
  return cal;
}

double membership(double dist, double rho, double sigma) {
  const double gap = dist - rho;
  return gap > 0.0 ? std::exp(-gap / sigma) : 1.0;
}

struct EdgeList {
  std::vector<std::uint32_t> head;
  std::vector<std::uint32_t> tail;
  std::vector<double> weight;
};

// Directed edges due at each SGD epoch, weight-proportional sampling.
struct SampledEdges {
  EdgeList edges;
  std::vector<double> epochs_per_sample;
};

SampledEdges schedule_edges(const EdgeList& edges, int n_epochs) {
  double max_w = 0.0;
  for (double w : edges.weight) max_w = std::max(max_w, w);
  SampledEdges out;
  for (std::size_t e = 0; e < edges.weight.size(); ++e) {
    const double w = edges.weight[e];
    if (w <= 0.0 || w < max_w / static_cast<double>(n_epochs)) continue;  // never sampled
    out.edges.head.push_back(edges.head[e]);
    out.edges.tail.push_back(edges.tail[e]);
    out.edges.weight.push_back(w);
    out.epochs_per_sample.push_back(max_w / w);
  }
  return out;
}

double clip(double v) { return v < -kGradClip ? -kGradClip : (v > kGradClip ? kGradClip : v); }

// Shared SGD loop; move_other is true while fitting (both endpoints move)
// and false in transform (the reference layout is frozen). head_positions
// and tail_positions alias the same storage during fit.
void optimize_layout(std::vector<Point2>& head_positions, std::vector<Point2>& tail_positions,
                     const SampledEdges& sched, int n_epochs, double a, double b,
                     const UmapConfig& cfg, bool move_other, Rng& rng) {
  const std::size_t n_edges = sched.edges.head.size();
  const std::size_t n_tail = tail_positions.size();
  std::vector<double> epoch_of_next_sample = sched.epochs_per_sample;
  std::vector<double> epochs_per_negative(n_edges);
  std::vector<double> epoch_of_next_negative(n_edges);
  for (std::size_t e = 0; e < n_edges; ++e) {
    epochs_per_negative[e] = sched.epochs_per_sample[e] / cfg.negative_sample_rate;
    epoch_of_next_negative[e] = epochs_per_negative[e];
  }

  for (int epoch = 0; epoch < n_epochs; ++epoch) {
    const double alpha =
        cfg.learning_rate * (1.0 - static_cast<double>(epoch) / static_cast<double>(n_epochs));
    for (std::size_t e = 0; e < n_edges; ++e) {
      if (epoch_of_next_sample[e] > static_cast<double>(epoch)) continue;
      const std::uint32_t i = sched.edges.head[e];
      const std::uint32_t j = sched.edges.tail[e];
      Point2& yi = head_positions[i];
      Point2& yj = tail_positions[j];

      const double dx = yi[0] - yj[0];
      const double dy = yi[1] - yj[1];
      const double d2 = dx * dx + dy * dy;
      double gc = 0.0;
      if (d2 > 0.0) {
        const double pd = std::pow(d2, b);
        gc = (-2.0 * a * b * pd / d2) / (a * pd + 1.0);
      }
      const double gx = clip(gc * dx);
      const double gy = clip(gc * dy);
      yi[0] += alpha * gx;
      yi[1] += alpha * gy;
      if (move_other) {
        yj[0] -= alpha * gx;
        yj[1] -= alpha * gy;
      }
      epoch_of_next_sample[e] += sched.epochs_per_sample[e];

      const int n_neg = static_cast<int>(
          (static_cast<double>(epoch) - epoch_of_next_negative[e]) / epochs_per_negative[e]);
      for (int s = 0; s < n_neg; ++s) {
        const std::uint32_t k = static_cast<std::uint32_t>(rng.bounded(n_tail));
        const Point2& yk = tail_positions[k];
        const double ndx = yi[0] - yk[0];
        const double ndy = yi[1] - yk[1];
        const double nd2 = ndx * ndx + ndy * ndy;
        if (nd2 > 0.0) {
          const double pd = std::pow(nd2, b);
          const double ngc = 2.0 * cfg.repulsion_strength * b / ((0.001 + nd2) * (a * pd + 1.0));
          yi[0] += alpha * clip(ngc * ndx);
          yi[1] += alpha * clip(ngc * ndy);
        } else if (j == k) {
          continue;
        } else {
          yi[0] += alpha * kGradClip;
          yi[1] += alpha * kGradClip;
        }
      }
      if (n_neg > 0)
        epoch_of_next_negative[e] += n_neg * epochs_per_negative[e];
    }
  }
}

std::vector<double> flatten(const std::vector<std::vector<double>>& vectors, std::size_t& dim) {
  if (vectors.empty()) raise(Errc::EmptyInput, "no vectors");
  dim = vectors.front().size();
  if (dim == 0) raise(Errc::EmptyInput, "zero-dimensional vectors");
  std::vector<double> flat;
  flat.reserve(vectors.size() * dim);
  for (const auto& v : vectors) {
    if (v.size() != dim)
      raise(Errc::DimensionMismatch, "ragged vector list passed to projection");
    flat.insert(flat.end(), v.begin(), v.end());
  }
  return flat;
}

}  // namespace

std::pair<double, double> find_ab_params(double min_dist, double spread) {
  constexpr int kGrid = 300;
  std::vector<double> x(kGrid), target(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    x[i] = 3.0 * spread * static_cast<double>(i) / (kGrid - 1);
    target[i] = x[i] <= min_dist ? 1.0 : std::exp(-(x[i] - min_dist) / spread);
  }

  // Levenberg-Marquardt on f(x) = 1/(1 + a x^{2b})
  double a = 1.0, b = 1.0;
  double lambda = 1e-3;
  auto sse = [&](double pa, double pb) {
    double s = 0.0;
    for (int i = 0; i < kGrid; ++i) {
      const double t = x[i] > 0.0 ? std::pow(x[i], 2.0 * pb) : 0.0;
      const double f = 1.0 / (1.0 + pa * t);
      s += (f - target[i]) * (f - target[i]);
    }
    return s;
  };
  double err = sse(a, b);
  for (int iter = 0; iter < 200; ++iter) {
    double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
    for (int i = 0; i < kGrid; ++i) {
      const double t = x[i] > 0.0 ? std::pow(x[i], 2.0 * b) : 0.0;
      const double denom = 1.0 + a * t;
      const double f = 1.0 / denom;
      const double r = f - target[i];
      const double dfda = -t / (denom * denom);
      const double dfdb = x[i] > 0.0 ? -a * t * 2.0 * std::log(x[i]) / (denom * denom) : 0.0;
      jtj00 += dfda * dfda;
      jtj01 += dfda * dfdb;
      jtj11 += dfdb * dfdb;
      jtr0 += dfda * r;
      jtr1 += dfdb * r;
    }
    bool improved = false;
    for (int attempt = 0; attempt < 16; ++attempt) {
      const double m00 = jtj00 + lambda * jtj00;
      const double m11 = jtj11 + lambda * jtj11;
      const double det = m00 * m11 - jtj01 * jtj01;
      if (det == 0.0) break;
      const double da = (-jtr0 * m11 + jtr1 * jtj01) / det;
      const double db = (-jtr1 * m00 + jtr0 * jtj01) / det;
      const double na = a + da, nb = b + db;
      if (na > 0.0 && nb > 0.0) {
        const double nerr = sse(na, nb);
        if (nerr < err) {
          a = na;
          b = nb;
          err = nerr;
          lambda = std::max(lambda * 0.1, 1e-12);
          improved = true;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  return {a, b};
}

UmapModel umap_fit(const std::vector<std::vector<double>>& vectors, const UmapConfig& config) {
  UmapModel model;
  model.config = config;
  if (config.n_neighbors < 2) raise(Errc::TooFewPoints, "n_neighbors must be >= 2");
  if (!(config.min_dist > 0.0 && config.min_dist < 1.0))
    raise(Errc::TooFewPoints, "min_dist must be in (0, 1)");

  std::size_t dim = 0;
  std::vector<double> data = flatten(vectors, dim);
  const std::size_t n = vectors.size();
  if (n <= static_cast<std::size_t>(config.n_neighbors))
    raise(Errc::TooFewPoints, "need more vectors than n_neighbors (" + std::to_string(n) +
                                  " <= " + std::to_string(config.n_neighbors) + ")");

  const std::size_t k_real = static_cast<std::size_t>(config.n_neighbors) - 1;
  bool any_positive = false;
  const Knn knn = brute_force_knn(data, n, data, n, dim, k_real, true, &any_positive);
  if (!any_positive) raise(Errc::DegenerateDistances, "all pairwise distances are zero");

  const double target = std::log2(static_cast<double>(config.n_neighbors));
  const Calibration cal = smooth_knn(knn, n, target, true);

  // fuzzy union: w = a + b - a*b over the directed membership graph
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < k_real; ++m) {
      const std::uint32_t j = knn.index[i * k_real + m];
      const double w = membership(knn.dist[i * k_real + m], cal.rho[i], cal.sigma[i]);
      const bool flipped = j < static_cast<std::uint32_t>(i);
      const auto key = flipped ? std::make_pair(j, static_cast<std::uint32_t>(i))
                               : std::make_pair(static_cast<std::uint32_t>(i), j);
      auto& slot = pairs[key];
      if (flipped)
        slot.second = std::max(slot.second, w);
      else
        slot.first = std::max(slot.first, w);
    }
  }
  EdgeList sym;
  for (const auto& [key, ab] : pairs) {
    const double w = ab.first + ab.second - ab.first * ab.second;
    if (w <= 0.0) continue;
    sym.head.push_back(key.first);
    sym.tail.push_back(key.second);
    sym.weight.push_back(w);
    sym.head.push_back(key.second);
    sym.tail.push_back(key.first);
    sym.weight.push_back(w);
  }

  // spectral initialization on the symmetrized graph
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t e = 0; e < sym.head.size(); ++e)
    adj(sym.head[e], sym.tail[e]) = sym.weight[e];
  Eigen::VectorXd deg = adj.rowwise().sum();
  for (Eigen::Index i = 0; i < deg.size(); ++i)
    if (deg(i) <= 0.0) deg(i) = 1.0;
  Eigen::VectorXd dinv = deg.array().rsqrt();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) -
                        dinv.asDiagonal() * adj * dinv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap);
  if (eig.info() != Eigen::Success) raise(Errc::DegenerateDistances, "spectral initialization failed");

  model.positions.assign(n, {0.0, 0.0});
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    model.positions[i][0] = eig.eigenvectors()(static_cast<Eigen::Index>(i), 1);
    model.positions[i][1] = eig.eigenvectors()(static_cast<Eigen::Index>(i), 2);
    max_abs = std::max({max_abs, std::fabs(model.positions[i][0]), std::fabs(model.positions[i][1])});
  }
  if (max_abs == 0.0) max_abs = 1.0;
  Rng rng(config.seed);
  const double expansion = 10.0 / max_abs;
  for (auto& p : model.positions) {
    p[0] = p[0] * expansion + 1e-4 * rng.normal();
    p[1] = p[1] * expansion + 1e-4 * rng.normal();
  }

  const auto [curve_a, curve_b] = find_ab_params(config.min_dist);
  model.curve_a = curve_a;
  model.curve_b = curve_b;

  const SampledEdges sched = schedule_edges(sym, config.fit_epochs);
  optimize_layout(model.positions, model.positions, sched, config.fit_epochs, curve_a, curve_b,
                  config, true, rng);

  model.dim = dim;
  model.n_train = n;
  model.train_data = std::move(data);
  model.fitted = true;
  return model;
}

std::vector<Point2> umap_transform(const UmapModel& model,
                                   const std::vector<std::vector<double>>& vectors) {
  if (!model.fitted) raise(Errc::NotFitted, "transform called before fit");
  if (vectors.empty()) raise(Errc::EmptyInput, "no vectors to transform");
  std::size_t dim = 0;
  const std::vector<double> data = flatten(vectors, dim);
  if (dim != model.dim)
    raise(Errc::DimensionMismatch, "query dimension " + std::to_string(dim) +
                                       " != model dimension " + std::to_string(model.dim));
  const std::size_t n_query = vectors.size();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(model.config.n_neighbors),
                                              model.n_train);

  const Knn knn = brute_force_knn(data, n_query, model.train_data, model.n_train, model.dim, k,
                                  false, nullptr);
  const double target = std::log2(static_cast<double>(model.config.n_neighbors));
  const Calibration cal = smooth_knn(knn, n_query, target, false);

  EdgeList edges;
  std::vector<Point2> positions(n_query, {0.0, 0.0});
  for (std::size_t q = 0; q < n_query; ++q) {
    double wsum = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      const std::uint32_t j = knn.index[q * k + m];
      const double w = membership(knn.dist[q * k + m], cal.rho[q], cal.sigma[q]);
      edges.head.push_back(static_cast<std::uint32_t>(q));
      edges.tail.push_back(j);
      edges.weight.push_back(w);
      positions[q][0] += w * model.positions[j][0];
      positions[q][1] += w * model.positions[j][1];
      wsum += w;
    }
    if (wsum > 0.0) {
      positions[q][0] /= wsum;
      positions[q][1] /= wsum;
    }
  }

  Rng rng(model.config.seed ^ 0x7472616E73666FULL);  // distinct transform stream
  const SampledEdges sched = schedule_edges(edges, model.config.transform_epochs);
  std::vector<Point2> frozen = model.positions;
  optimize_layout(positions, frozen, sched, model.config.transform_epochs, model.curve_a,
                  model.curve_b, model.config, false, rng);
  return positions;
}

double dispersion(std::span<const Point2> points) {
  if (points.size() < 2) raise(Errc::TooFewPoints, "dispersion needs at least 2 points");
  double cx = 0.0, cy = 0.0;
  for (const Point2& p : points) {
    cx += p[0];
    cy += p[1];
  }
  cx /= static_cast<double>(points.size());
  cy /= static_cast<double>(points.size());
  double mean = 0.0;
  for (const Point2& p : points)
    mean += std::sqrt((p[0] - cx) * (p[0] - cx) + (p[1] - cy) * (p[1] - cy));
  return mean / static_cast<double>(points.size());
}

std::vector<Point2> pca_project(const std::vector<std::vector<double>>& vectors) {
  std::size_t dim = 0;
  const std::vector<double> data = flatten(vectors, dim);
  const std::size_t n = vectors.size();
  if (n < 2) raise(Errc::TooFewPoints, "pca needs at least 2 points");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = data[i * dim + d];
  Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  Eigen::MatrixXd cov = (x.adjoint() * x) / static_cast<double>(n > 1 ? n - 1 : 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) raise(Errc::DegenerateDistances, "pca eigensolver failed");
  const Eigen::Index last = cov.rows() - 1;
  Eigen::MatrixXd proj(cov.rows(), 2);
  proj.col(0) = eig.eigenvectors().col(last);
  proj.col(1) = cov.rows() > 1 ? eig.eigenvectors().col(last - 1) : eig.eigenvectors().col(last);
  Eigen::MatrixXd y = x * proj;
  std::vector<Point2> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = {y(static_cast<Eigen::Index>(i), 0), y(static_cast<Eigen::Index>(i), 1)};
  return out;
}

// --- serialization --------------------------------------------------------

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

struct Cursor {
  std::string_view bytes;
  std::size_t pos = 0;

  void need(std::size_t nb) {
    if (pos + nb > bytes.size()) raise(Errc::BadFile, "UMP1 container: truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
};

}  // namespace

void save_umap_model(const UmapModel& model, const std::filesystem::path& path) {
  if (!model.fitted) raise(Errc::NotFitted, "refusing to serialize an unfitted model");
  std::string out;
  out.append("UMP1", 4);
  put_u32(out, static_cast<std::uint32_t>(model.config.n_neighbors));
  put_f64(out, model.config.min_dist);
  put_u32(out, static_cast<std::uint32_t>(model.config.fit_epochs));
  put_u32(out, static_cast<std::uint32_t>(model.config.transform_epochs));
  put_u32(out, static_cast<std::uint32_t>(model.config.negative_sample_rate));
  put_f64(out, model.config.learning_rate);
  put_f64(out, model.config.repulsion_strength);
  put_u64(out, model.config.seed);
  put_u64(out, model.dim);
  put_u64(out, model.n_train);
  put_f64(out, model.curve_a);
  put_f64(out, model.curve_b);
  for (double v : model.train_data) put_f64(out, v);
  for (const Point2& p : model.positions) {
    put_f64(out, p[0]);
    put_f64(out, p[1]);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(Errc::IoError, "cannot open for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) raise(Errc::IoError, "short write: " + path.string());
}

UmapModel load_umap_model(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(Errc::IoError, "cannot open: " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string bytes = ss.str();
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "UMP1", 4) != 0)
    raise(Errc::BadFile, path.string() + ": not a UMP1 container");
  Cursor in{bytes, 4};
  UmapModel m;
  m.config.n_neighbors = static_cast<int>(in.u32());
  m.config.min_dist = in.f64();
  m.config.fit_epochs = static_cast<int>(in.u32());
  m.config.transform_epochs = static_cast<int>(in.u32());
  m.config.negative_sample_rate = static_cast<int>(in.u32());
  m.config.learning_rate = in.f64();
  m.config.repulsion_strength = in.f64();
  m.config.seed = in.u64();
  m.dim = in.u64();
  m.n_train = in.u64();
  m.curve_a = in.f64();
  m.curve_b = in.f64();
  m.train_data.resize(m.dim * m.n_train);
  for (double& v : m.train_data) v = in.f64();
  m.positions.resize(m.n_train);
  for (Point2& p : m.positions) {
    p[0] = in.f64();
    p[1] = in.f64();
  }
  if (in.pos != bytes.size()) raise(Errc::BadFile, path.string() + ": trailing bytes");
  m.fitted = true;
  return m;
}

}  // namespace wavepmf
