// Copyright 2026 The Style Filter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stylefilter/matrix.hpp"

namespace stylefilter {

/// Per-dimension z-score transform. Fit once on the union of both domains so
/// source and target land in the same standardized space.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;  // population

  static constexpr double kMinStd = 1e-12;

  // Requires >= 2 rows.
  static Standardizer fit(const Matrix& points);
  Matrix transform(const Matrix& points) const;
};

struct Standardized {
  Matrix points;
  Standardizer transform;
};

Standardized standardize(const Matrix& points);

struct KMeansOptions {
  int k = 1;
  std::uint64_t seed = 0;
  int restarts = 10;
  int max_iter = 300;
  double tol = 1e-8;
  // Optional per-point weights (all > 0). Empty means unweighted.
  std::vector<double> weights;
  // Keeps the per-iteration SSE of every restart in the result.
  bool record_trace = false;
};

struct ClusteringResult {
  int k = 0;
  std::vector<int> assignments;
  Matrix centroids;  // k x D
  double sse = 0.0;
  std::uint64_t seed = 0;
  int restarts = 0;
  int iterations_run = 0;  // of the winning restart
  int best_restart = 0;
  // sse_trace[r][i]: SSE after iteration i of restart r (index 0 = seeding).
  std::vector<std::vector<double>> sse_trace;

  std::vector<std::size_t> member_counts() const;
};

// Best-of-restarts Lloyd's algorithm with k-means++ seeding; restart r uses
// seed + r. Empty clusters are repaired by moving the point farthest from its
// centroid. Throws ValidationError unless 1 <= k <= N and restarts >= 1.
ClusteringResult kmeans(const Matrix& points, const KMeansOptions& opts);

// Weighted SSE of an assignment against the given centroids.
double clustering_sse(const Matrix& points, std::span<const int> assignments,
                      const Matrix& centroids, std::span<const double> weights = {});

struct SilhouetteResult {
  double mean = 0.0;
  std::vector<double> per_point;
};

// Euclidean silhouette. Singletons score 0. Throws ValidationError
// ("silhouette undefined for k=1") when fewer than two clusters are present.
SilhouetteResult silhouette(const Matrix& points, std::span<const int> assignments);

struct KDiagnostics {
  std::vector<int> candidate_ks;
  std::vector<double> sse_curve;
  std::vector<double> silhouette_curve;
  std::optional<int> suggested_k_elbow;  // absent with < 3 candidates
  int suggested_k_silhouette = 0;
};

// Runs kmeans per candidate (seed derived per k). The elbow suggestion is the
// interior candidate maximizing the discrete second difference of SSE.
KDiagnostics diagnose_k(const Matrix& points, std::span<const int> candidate_ks,
                        std::uint64_t seed, int restarts);

std::optional<int> elbow_by_second_difference(std::span<const int> ks,
                                              std::span<const double> sse);

}  // namespace stylefilter
