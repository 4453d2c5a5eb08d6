// core/include/wavepmf/umap.hpp

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
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace wavepmf {

// Self-contained 2-D UMAP: exact brute-force k-NN, smooth-kNN calibration
// (local connectivity 1, 32 binary-search iterations), fuzzy union
// a+b-ab, spectral initialization, and sequential seeded SGD with negative
// sampling. The layout loop is single-threaded on purpose: fit and
// transform are bitwise reproducible for a fixed seed.
struct UmapConfig {
  int n_neighbors = 15;
  double min_dist = 0.1;
  int fit_epochs = 500;
  int transform_epochs = 100;
  int negative_sample_rate = 5;
  double learning_rate = 1.0;
  double repulsion_strength = 1.0;
  std::uint64_t seed = 0;
  // n_components is fixed at 2; metric is fixed Euclidean.
};

using Point2 = std::array<double, 2>;

struct UmapModel {
  UmapConfig config;
  std::size_t dim = 0;
  std::size_t n_train = 0;
  std::vector<double> train_data;  // n_train x dim, row-major
  std::vector<Point2> positions;   // frozen after fit
  double curve_a = 0.0;            // low-dim membership curve 1/(1 + a d^{2b})
  double curve_b = 0.0;
  bool fitted = false;
};

// Least-squares fit of 1/(1+a d^{2b}) to the min_dist membership curve on a
// 300-point grid over [0, 3*spread].
std::pair<double, double> find_ab_params(double min_dist, double spread = 1.0);

UmapModel umap_fit(const std::vector<std::vector<double>>& vectors, const UmapConfig& config);

// Out-of-sample embedding against the frozen training layout.
std::vector<Point2> umap_transform(const UmapModel& model,
                                   const std::vector<std::vector<double>>& vectors);

// Mean Euclidean distance of points to their centroid.
double dispersion(std::span<const Point2> points);

// Top-2 principal components; smoke-test fallback, not used for reports
// unless explicitly requested.
std::vector<Point2> pca_project(const std::vector<std::vector<double>>& vectors);

// Binary container "UMP1".
void save_umap_model(const UmapModel& model, const std::filesystem::path& path);
UmapModel load_umap_model(const std::filesystem::path& path);

}  // namespace wavepmf
