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

#include "stylefilter/projection.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "stylefilter/error.hpp"
#include "stylefilter/fileio.hpp"
#include "stylefilter/rng.hpp"

namespace stylefilter {

std::string_view to_string(ProjectionMethod m) { return m == ProjectionMethod::pca ? "pca" : "tsne"; }

ProjectionMethod parse_projection_method(std::string_view text) {
  if (text == "pca") return ProjectionMethod::pca;
  if (text == "tsne") return ProjectionMethod::tsne;
  throw ConfigError("unknown projection method '" + std::string(text) + "'");
}

Projection2D pca_project(const Matrix& vectors, int out_dims) {
  const auto n = vectors.rows();
  const auto d = vectors.cols();
  if (n < 2) throw ValidationError("pca: need at least 2 points");
  if (out_dims < 1 || static_cast<std::size_t>(out_dims) > std::min(n - 1, d)) {
    throw ValidationError("pca: out_dims=" + std::to_string(out_dims) + " exceeds min(N-1, D)=" +
                          std::to_string(std::min(n - 1, d)));
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vectors(i, j);
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  Eigen::MatrixXd v = svd.matrixV();

  Projection2D p;
  p.method = ProjectionMethod::pca;
  const double total = s.squaredNorm();
  p.explained_variance_ratio.assign(d, 0.0);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    p.explained_variance_ratio[static_cast<std::size_t>(i)] = total > 0.0 ? s(i) * s(i) / total : 0.0;
  }
  for (int c = 0; c < out_dims; ++c) {
    Eigen::Index arg = 0;
    v.col(c).cwiseAbs().maxCoeff(&arg);
    if (v(arg, c) < 0.0) v.col(c) *= -1.0;
  }
  const Eigen::MatrixXd coords = x * v.leftCols(out_dims);
  p.coords = Matrix(n, static_cast<std::size_t>(out_dims));
  p.components = Matrix(static_cast<std::size_t>(out_dims), d);
  for (int c = 0; c < out_dims; ++c) {
    for (std::size_t i = 0; i < n; ++i) p.coords(i, static_cast<std::size_t>(c)) = coords(static_cast<Eigen::Index>(i), c);
    for (std::size_t j = 0; j < d; ++j) p.components(static_cast<std::size_t>(c), j) = v(static_cast<Eigen::Index>(j), c);
  }
  return p;
}

namespace {

Matrix pairwise_squared(const Matrix& x) {
  const std::size_t n = x.rows();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = squared_distance(x.row(i), x.row(j));
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

}  // namespace

ConditionalAffinities conditional_affinities(const Matrix& vectors, double perplexity) {
  const std::size_t n = vectors.rows();
  if (n < 2) throw ValidationError("tsne: need at least 2 points");
  if (!(perplexity > 0.0)) throw ValidationError("tsne: perplexity must be positive");
  const Matrix d2 = pairwise_squared(vectors);
  const double target = std::log(perplexity);

  ConditionalAffinities out;
  out.p = Matrix(n, n);
  out.entropy_bits.assign(n, 0.0);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dmin = std::min(dmin, d2(i, j));
    }
    double beta = 1.0;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double entropy = 0.0;
    for (int it = 0; it < 200; ++it) {
      double sum = 0.0, weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          row[j] = 0.0;
          continue;
        }
        const double shifted = d2(i, j) - dmin;
        row[j] = std::exp(-beta * shifted);
        sum += row[j];
        weighted += shifted * row[j];
      }
      entropy = std::log(sum) + beta * weighted / sum;
      const double diff = entropy - target;
      if (std::abs(diff) < 1e-10) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    double sum = 0.0;
    for (double v : row) sum += v;
    for (std::size_t j = 0; j < n; ++j) out.p(i, j) = row[j] / sum;
    out.entropy_bits[i] = entropy / std::numbers::ln2;
  }
  return out;
}

Matrix joint_affinities(const Matrix& vectors, double perplexity) {
  const ConditionalAffinities c = conditional_affinities(vectors, perplexity);
  const std::size_t n = vectors.rows();
  Matrix p(n, n);
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) p(i, j) = (c.p(i, j) + c.p(j, i)) * scale;
  }
  return p;
}

double tsne_kl_divergence(const Matrix& joint_p, const Matrix& y) {
  const std::size_t n = y.rows();
  double z = 0.0;
  Matrix num(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      num(i, j) = 1.0 / (1.0 + squared_distance(y.row(i), y.row(j)));
      z += num(i, j);
    }
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double p = joint_p(i, j);
      if (i == j || p <= 0.0) continue;
      const double q = std::max(num(i, j) / z, std::numeric_limits<double>::min());
      kl += p * std::log(p / q);
    }
  }
  return kl;
}

Projection2D tsne_project(const Matrix& vectors, const TsneParams& params) {
  const std::size_t n = vectors.rows();
  if (n < 4) throw ValidationError("tsne: need at least 4 points");
  if (!(params.perplexity > 0.0) || params.perplexity >= (static_cast<double>(n) - 1.0) / 3.0) {
    throw ValidationError("tsne: perplexity " + std::to_string(params.perplexity) +
                          " infeasible for N=" + std::to_string(n) + " (must be < (N-1)/3)");
  }
  if (params.iterations < 1) throw ValidationError("tsne: iterations must be >= 1");
  const Matrix p = joint_affinities(vectors, params.perplexity);
  const double lr = params.learning_rate > 0.0 ? params.learning_rate
                                               : static_cast<double>(n) / params.exaggeration;

  Rng rng(params.seed);
  Matrix y(n, 2), step(n, 2), gains(n, 2, 1.0), grad(n, 2);
  for (auto& v : y.data()) v = 1e-4 * rng.normal();

  Projection2D out;
  out.method = ProjectionMethod::tsne;
  out.tsne = params;
  out.tsne.learning_rate = lr;
  out.initial_kl = tsne_kl_divergence(p, y);

  Matrix num(n, n);
  for (int it = 0; it < params.iterations; ++it) {
    const double exag = it < params.exaggeration_iterations ? params.exaggeration : 1.0;
    const double momentum = it < params.exaggeration_iterations ? 0.5 : 0.8;
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = 1.0 / (1.0 + squared_distance(y.row(i), y.row(j)));
        num(i, j) = v;
        num(j, i) = v;
        z += 2.0 * v;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double gx = 0.0, gy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double mult = (exag * p(i, j) - num(i, j) / z) * num(i, j);
        gx += mult * (y(i, 0) - y(j, 0));
        gy += mult * (y(i, 1) - y(j, 1));
      }
      grad(i, 0) = 4.0 * gx;
      grad(i, 1) = 4.0 * gy;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < 2; ++c) {
        double& g = gains(i, c);
        g = (grad(i, c) > 0.0) != (step(i, c) > 0.0) ? g + 0.2 : g * 0.8;
        g = std::max(g, 0.01);
        step(i, c) = momentum * step(i, c) - lr * g * grad(i, c);
        y(i, c) += step(i, c);
      }
    }
    for (std::size_t c = 0; c < 2; ++c) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += y(i, c);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) y(i, c) -= mean;
    }
  }
  out.final_kl = tsne_kl_divergence(p, y);
  out.coords = std::move(y);
  return out;
}

namespace {

std::string num(double v) {
  return fmt::format("{}", v);  // shortest round-trip form
}

}  // namespace

std::string format_projection_table(const Projection2D& p) {
  const std::size_t n = p.coords.rows();
  if (n == 0) throw ValidationError("refusing to export an empty projection");
  if (p.coords.cols() < 2) throw ValidationError("projection must have two coordinates");
  std::string out = "id\tx\ty\tcluster\tdomain\n";
  for (std::size_t i = 0; i < n; ++i) {
    out += (i < p.point_ids.size() ? p.point_ids[i] : std::to_string(i)) + "\t";
    out += num(p.coords(i, 0)) + "\t" + num(p.coords(i, 1)) + "\t";
    out += std::to_string(i < p.cluster_labels.size() ? p.cluster_labels[i] : 0) + "\t";
    out += (i < p.domains.size() ? p.domains[i] : std::string("-")) + "\n";
  }
  return out;
}

void export_projection(const Projection2D& p, const std::filesystem::path& path) {
  write_file_atomic(path, format_projection_table(p));
}

void export_projection_svg(const Projection2D& p, const std::filesystem::path& path) {
  const std::size_t n = p.coords.rows();
  if (n == 0) throw ValidationError("refusing to export an empty projection");
  static constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                             "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  double x0 = p.coords(0, 0), x1 = x0, y0 = p.coords(0, 1), y1 = y0;
  for (std::size_t i = 0; i < n; ++i) {
    x0 = std::min(x0, p.coords(i, 0));
    x1 = std::max(x1, p.coords(i, 0));
    y0 = std::min(y0, p.coords(i, 1));
    y1 = std::max(y1, p.coords(i, 1));
  }
  const double size = 600.0, margin = 20.0;
  const double sx = x1 > x0 ? (size - 2 * margin) / (x1 - x0) : 1.0;
  const double sy = y1 > y0 ? (size - 2 * margin) / (y1 - y0) : 1.0;
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n"
      "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const int cluster = i < p.cluster_labels.size() ? p.cluster_labels[i] : 0;
    const char* colour = kPalette[static_cast<std::size_t>(std::abs(cluster)) % std::size(kPalette)];
    const double cx = margin + (p.coords(i, 0) - x0) * sx;
    const double cy = size - margin - (p.coords(i, 1) - y0) * sy;
    char buf[160];
    if (i < p.domains.size() && p.domains[i] == "target") {
      std::snprintf(buf, sizeof buf, "<rect x=\"%.2f\" y=\"%.2f\" width=\"6\" height=\"6\" fill=\"%s\"/>\n",
                    cx - 3, cy - 3, colour);
    } else {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", cx, cy, colour);
    }
    out += buf;
  }
  out += "</svg>\n";
  write_file_atomic(path, out);
}

std::vector<ProjectionRow> parse_projection_table(std::string_view text) {
  std::vector<ProjectionRow> rows;
  std::size_t pos = text.find('\n');
  if (pos == std::string_view::npos || text.substr(0, pos) != "id\tx\ty\tcluster\tdomain") {
    throw CorruptError("projection table: bad header");
  }
  ++pos;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t s = 0;
    while (true) {
      const auto t = line.find('\t', s);
      f.push_back(line.substr(s, t == std::string::npos ? std::string::npos : t - s));
      if (t == std::string::npos) break;
      s = t + 1;
    }
    if (f.size() != 5) throw CorruptError("projection table: expected 5 columns");
    rows.push_back({f[0], std::strtod(f[1].c_str(), nullptr), std::strtod(f[2].c_str(), nullptr),
                    std::atoi(f[3].c_str()), f[4]});
  }
  return rows;
}

}  // namespace stylefilter
