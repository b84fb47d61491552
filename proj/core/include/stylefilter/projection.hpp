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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stylefilter/matrix.hpp"

namespace stylefilter {

enum class ProjectionMethod { pca, tsne };

std::string_view to_string(ProjectionMethod m);
ProjectionMethod parse_projection_method(std::string_view text);

struct TsneParams {
  double perplexity = 30.0;
  int iterations = 1000;
  double exaggeration = 12.0;
  int exaggeration_iterations = 250;
  std::uint64_t seed = 0;
  // <= 0 selects N / exaggeration.
  double learning_rate = 0.0;
};

struct Projection2D {
  ProjectionMethod method = ProjectionMethod::pca;
  Matrix coords;  // N x out_dims
  std::vector<std::string> point_ids;
  std::vector<int> cluster_labels;
  std::vector<std::string> domains;

  // PCA: ratio for every component (sums to 1); components are the loadings
  // of the retained directions, one row each.
  std::vector<double> explained_variance_ratio;
  Matrix components;

  // t-SNE
  TsneParams tsne;
  double initial_kl = 0.0;
  double final_kl = 0.0;
};

// Centres the data and projects onto the top right singular vectors. Each
// component's largest-magnitude loading is made positive. Throws
// ValidationError for N < 2 or out_dims > min(N-1, D).
Projection2D pca_project(const Matrix& vectors, int out_dims = 2);

// Row-normalized conditional affinities p(j|i) with per-point Gaussian
// precisions bisected to match the perplexity; also returns the entropies in
// bits.
struct ConditionalAffinities {
  Matrix p;
  std::vector<double> entropy_bits;
};
ConditionalAffinities conditional_affinities(const Matrix& vectors, double perplexity);

// Symmetrized joint affinities (p(j|i) + p(i|j)) / 2N.
Matrix joint_affinities(const Matrix& vectors, double perplexity);

// Exact t-SNE to two dimensions with momentum, gains and early exaggeration.
// Throws ValidationError for N < 4 or perplexity >= (N-1)/3.
Projection2D tsne_project(const Matrix& vectors, const TsneParams& params);

// KL(P || Q) for a 2-D embedding under the Student-t kernel.
double tsne_kl_divergence(const Matrix& joint_p, const Matrix& embedding);

// Tab-separated "id x y cluster domain" with a header; refuses an empty
// projection.
std::string format_projection_table(const Projection2D& p);
void export_projection(const Projection2D& p, const std::filesystem::path& path);
// Scatter plot with one colour per cluster.
void export_projection_svg(const Projection2D& p, const std::filesystem::path& path);

struct ProjectionRow {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  int cluster = 0;
  std::string domain;
};
std::vector<ProjectionRow> parse_projection_table(std::string_view text);

}  // namespace stylefilter
