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

#include "stylefilter/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "stylefilter/error.hpp"
#include "stylefilter/rng.hpp"

namespace stylefilter {

Standardizer Standardizer::fit(const Matrix& points) {
  if (points.rows() < 2) throw ValidationError("standardize: need at least 2 points");
  const std::size_t n = points.rows(), d = points.cols();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += points(i, j);
  }
  for (auto& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double v = points(i, j) - s.mean[j];
      s.stddev[j] += v * v;
    }
  }
  for (auto& v : s.stddev) v = std::sqrt(v / static_cast<double>(n));
  return s;
}

Matrix Standardizer::transform(const Matrix& points) const {
  if (points.cols() != mean.size()) throw ValidationError("standardize: dimension mismatch");
  Matrix out(points.rows(), points.cols());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    for (std::size_t j = 0; j < points.cols(); ++j) {
      out(i, j) = stddev[j] < kMinStd ? 0.0 : (points(i, j) - mean[j]) / stddev[j];
    }
  }
  return out;
}

Standardized standardize(const Matrix& points) {
  Standardizer s = Standardizer::fit(points);
  Matrix z = s.transform(points);
  return {std::move(z), std::move(s)};
}

std::vector<std::size_t> ClusteringResult::member_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (int a : assignments) ++counts[static_cast<std::size_t>(a)];
  return counts;
}

double clustering_sse(const Matrix& points, std::span<const int> assignments,
                      const Matrix& centroids, std::span<const double> weights) {
  double sse = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    sse += w * squared_distance(points.row(i), centroids.row(static_cast<std::size_t>(assignments[i])));
  }
  return sse;
}

namespace {

struct RestartResult {
  std::vector<int> assignments;
  Matrix centroids;
  double sse = 0.0;
  int iterations = 0;
  std::vector<double> trace;
};

std::size_t weighted_pick(Rng& rng, std::span<const double> mass, double total) {
  const double target = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] <= 0.0) continue;
    acc += mass[i];
    last_positive = i;
    if (acc > target) return i;
  }
  return last_positive;
}

Matrix seed_plus_plus(const Matrix& points, int k, std::span<const double> w, Rng& rng) {
  const std::size_t n = points.rows();
  Matrix centers(static_cast<std::size_t>(k), points.cols());
  double total_w = 0.0;
  for (double x : w) total_w += x;
  std::size_t first = weighted_pick(rng, w, total_w);
  std::copy(points.row(first).begin(), points.row(first).end(), centers.row(0).begin());

  std::vector<double> d2(n), mass(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points.row(i), centers.row(0));
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mass[i] = w[i] * d2[i];
      total += mass[i];
    }
    const std::size_t pick = total > 0.0 ? weighted_pick(rng, mass, total) : rng.below(n);
    auto dst = centers.row(static_cast<std::size_t>(c));
    std::copy(points.row(pick).begin(), points.row(pick).end(), dst.begin());
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points.row(i), dst));
  }
  return centers;
}

// Nearest-centroid assignment, ties to the lowest index. Returns whether any
// assignment changed.
bool assign(const Matrix& points, const Matrix& centroids, std::vector<int>& a) {
  bool changed = false;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
      const double d = squared_distance(points.row(i), centroids.row(c));
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    if (a[i] != best) {
      a[i] = best;
      changed = true;
    }
  }
  return changed;
}

// Gives every empty cluster the point farthest from its current centroid,
// taken from a cluster that keeps at least one member.
bool repair_empty(const Matrix& points, const Matrix& centroids, std::span<const double> w,
                  std::vector<int>& a, int k) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (int x : a) ++counts[static_cast<std::size_t>(x)];
  bool changed = false;
  for (int j = 0; j < k; ++j) {
    if (counts[static_cast<std::size_t>(j)] > 0) continue;
    std::size_t far = points.rows();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
      if (counts[static_cast<std::size_t>(a[i])] < 2) continue;
      const double d = w[i] * squared_distance(points.row(i), centroids.row(static_cast<std::size_t>(a[i])));
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    --counts[static_cast<std::size_t>(a[far])];
    a[far] = j;
    ++counts[static_cast<std::size_t>(j)];
    changed = true;
  }
  return changed;
}

// Weighted means in point order; returns the largest squared centroid shift.
double update_centroids(const Matrix& points, std::span<const int> a, std::span<const double> w,
                        Matrix& centroids) {
  const std::size_t k = centroids.rows(), d = points.cols();
  Matrix sums(k, d);
  std::vector<double> mass(k, 0.0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto c = static_cast<std::size_t>(a[i]);
    auto dst = sums.row(c);
    const auto src = points.row(i);
    for (std::size_t j = 0; j < d; ++j) dst[j] += w[i] * src[j];
    mass[c] += w[i];
  }
  double shift = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    auto row = sums.row(c);
    for (auto& v : row) v /= mass[c];
    shift = std::max(shift, squared_distance(row, centroids.row(c)));
  }
  centroids = std::move(sums);
  return shift;
}

RestartResult lloyd(const Matrix& points, const KMeansOptions& opts, std::span<const double> w,
                    std::uint64_t seed) {
  Rng rng(seed);
  RestartResult r;
  r.centroids = seed_plus_plus(points, opts.k, w, rng);
  r.assignments.assign(points.rows(), -1);
  assign(points, r.centroids, r.assignments);
  repair_empty(points, r.centroids, w, r.assignments, opts.k);
  if (opts.record_trace) r.trace.push_back(clustering_sse(points, r.assignments, r.centroids, w));

  const double tol2 = opts.tol * opts.tol;
  bool stale = true;  // centroids lag the assignment
  for (int it = 0; it < opts.max_iter; ++it) {
    const double shift = update_centroids(points, r.assignments, w, r.centroids);
    ++r.iterations;
    stale = false;
    if (opts.record_trace) r.trace.push_back(clustering_sse(points, r.assignments, r.centroids, w));
    if (shift <= tol2) break;
    bool changed = assign(points, r.centroids, r.assignments);
    changed |= repair_empty(points, r.centroids, w, r.assignments, opts.k);
    if (!changed) break;
    stale = true;
  }
  // Out of iterations right after a reassignment: keep centroids the means.
  if (stale) update_centroids(points, r.assignments, w, r.centroids);
  r.sse = clustering_sse(points, r.assignments, r.centroids, w);
  return r;
}

}  // namespace

ClusteringResult kmeans(const Matrix& points, const KMeansOptions& opts) {
  const std::size_t n = points.rows();
  if (opts.k < 1) throw ValidationError("kmeans: k must be >= 1");
  if (static_cast<std::size_t>(opts.k) > n) {
    throw ValidationError("kmeans: k=" + std::to_string(opts.k) + " exceeds the number of points (" +
                          std::to_string(n) + ")");
  }
  if (opts.restarts < 1) throw ValidationError("kmeans: restarts must be >= 1");
  if (opts.max_iter < 1) throw ValidationError("kmeans: max_iter must be >= 1");
  std::vector<double> w = opts.weights;
  if (w.empty()) {
    w.assign(n, 1.0);
  } else {
    if (w.size() != n) throw ValidationError("kmeans: weight count differs from point count");
    for (double x : w) {
      if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("kmeans: weights must be positive");
    }
  }

  ClusteringResult best;
  best.sse = std::numeric_limits<double>::infinity();
  for (int r = 0; r < opts.restarts; ++r) {
    RestartResult rr = lloyd(points, opts, w, opts.seed + static_cast<std::uint64_t>(r));
    if (opts.record_trace) best.sse_trace.push_back(rr.trace);
    if (rr.sse < best.sse) {
      best.sse = rr.sse;
      best.assignments = std::move(rr.assignments);
      best.centroids = std::move(rr.centroids);
      best.iterations_run = rr.iterations;
      best.best_restart = r;
    }
  }
  best.k = opts.k;
  best.seed = opts.seed;
  best.restarts = opts.restarts;
  return best;
}

SilhouetteResult silhouette(const Matrix& points, std::span<const int> assignments) {
  const std::size_t n = points.rows();
  if (assignments.size() != n) throw ValidationError("silhouette: assignment count differs from point count");
  std::map<int, std::size_t> dense;
  for (int a : assignments) dense.emplace(a, 0);
  if (dense.size() < 2) throw ValidationError("silhouette undefined for k=1");
  if (n < 3) throw ValidationError("silhouette: need at least 3 points");
  std::size_t next = 0;
  for (auto& [label, idx] : dense) idx = next++;
  const std::size_t k = dense.size();
  std::vector<std::size_t> label(n), size(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    label[i] = dense[assignments[i]];
    ++size[label[i]];
  }

  SilhouetteResult out;
  out.per_point.assign(n, 0.0);
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < n; ++i) {
    if (size[label[i]] == 1) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sums[label[j]] += std::sqrt(squared_distance(points.row(i), points.row(j)));
    }
    const double a = sums[label[i]] / static_cast<double>(size[label[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != label[i]) b = std::min(b, sums[c] / static_cast<double>(size[c]));
    }
    const double denom = std::max(a, b);
    out.per_point[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  double total = 0.0;
  for (double s : out.per_point) total += s;
  out.mean = total / static_cast<double>(n);
  return out;
}

std::optional<int> elbow_by_second_difference(std::span<const int> ks, std::span<const double> sse) {
  if (ks.size() < 3 || ks.size() != sse.size()) return std::nullopt;
  std::size_t best = 1;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < ks.size(); ++i) {
    const double v = sse[i - 1] - 2.0 * sse[i] + sse[i + 1];
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return ks[best];
}

KDiagnostics diagnose_k(const Matrix& points, std::span<const int> candidate_ks, std::uint64_t seed,
                        int restarts) {
  const auto n = static_cast<int>(points.rows());
  if (candidate_ks.empty()) throw ValidationError("diagnose_k: no candidate k");
  for (std::size_t i = 0; i < candidate_ks.size(); ++i) {
    const int k = candidate_ks[i];
    if (k < 2 || k > n - 1) {
      throw ValidationError("diagnose_k: candidate k=" + std::to_string(k) + " outside [2, " +
                            std::to_string(n - 1) + "]");
    }
    if (i > 0 && k <= candidate_ks[i - 1]) throw ValidationError("diagnose_k: candidates must ascend");
  }
  KDiagnostics d;
  d.candidate_ks.assign(candidate_ks.begin(), candidate_ks.end());
  for (int k : candidate_ks) {
    KMeansOptions opts;
    opts.k = k;
    opts.seed = derive_seed(seed, static_cast<std::uint64_t>(k));
    opts.restarts = restarts;
    const ClusteringResult r = kmeans(points, opts);
    d.sse_curve.push_back(r.sse);
    d.silhouette_curve.push_back(silhouette(points, r.assignments).mean);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.silhouette_curve.size(); ++i) {
    if (d.silhouette_curve[i] > d.silhouette_curve[best]) best = i;
  }
  d.suggested_k_silhouette = d.candidate_ks[best];
  d.suggested_k_elbow = elbow_by_second_difference(d.candidate_ks, d.sse_curve);
  return d;
}

}  // namespace stylefilter
