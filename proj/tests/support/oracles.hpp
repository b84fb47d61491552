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

// Independent reference implementations used by the unit and acceptance
// tests. Deliberately naive: nothing here shares code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Points = std::vector<std::vector<double>>;

inline double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// SSE of an assignment with centroids at the part means.
inline double partition_sse(const Points& x, const std::vector<int>& labels, int k) {
  const std::size_t d = x.front().size();
  std::vector<std::vector<double>> sum(k, std::vector<double>(d, 0.0));
  std::vector<int> count(k, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++count[labels[i]];
    for (std::size_t j = 0; j < d; ++j) sum[labels[i]][j] += x[i][j];
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = sum[labels[i]][j] / count[labels[i]];
      sse += (x[i][j] - c) * (x[i][j] - c);
    }
  }
  return sse;
}

// Minimum SSE over every partition of x into exactly k non-empty parts,
// enumerated as restricted growth strings.
inline double brute_force_kmeans_sse(const Points& x, int k) {
  const int n = static_cast<int>(x.size());
  std::vector<int> a(n, 0);
  double best = std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, int i, int used) -> void {
    if (i == n) {
      if (used == k) best = std::min(best, partition_sse(x, a, k));
      return;
    }
    if (k - used > n - i) return;
    for (int c = 0; c <= std::min(used, k - 1); ++c) {
      a[i] = c;
      self(self, i + 1, std::max(used, c + 1));
    }
  };
  rec(rec, 0, 0);
  return best;
}

// Textbook silhouette; singletons score 0.
inline double naive_silhouette(const Points& x, const std::vector<int>& labels) {
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> sum(k, 0.0);
    std::vector<int> cnt(k, 0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j == i) continue;
      sum[labels[j]] += dist(x[i], x[j]);
      ++cnt[labels[j]];
    }
    const int own = labels[i];
    if (cnt[own] == 0) continue;  // singleton
    const double a = sum[own] / cnt[own];
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c != own && cnt[c] > 0) b = std::min(b, sum[c] / cnt[c]);
    }
    const double m = std::max(a, b);
    total += m > 0.0 ? (b - a) / m : 0.0;
  }
  return total / static_cast<double>(x.size());
}

inline Points random_points(std::mt19937_64& g, int n, int d, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Points p(n, std::vector<double>(d));
  for (auto& row : p) {
    for (auto& v : row) v = u(g);
  }
  return p;
}

// Isotropic Gaussian blobs, `per` points each, blob b centred at b * spacing
// on the first axis and (b % 2) * spacing on the second.
inline Points blobs(std::mt19937_64& g, int count, int per, int dims, double sigma, double spacing,
                    std::vector<int>* truth = nullptr) {
  std::normal_distribution<double> nd(0.0, sigma);
  Points p;
  for (int b = 0; b < count; ++b) {
    for (int i = 0; i < per; ++i) {
      std::vector<double> row(dims);
      for (int j = 0; j < dims; ++j) row[j] = nd(g);
      row[0] += b * spacing;
      if (dims > 1) row[1] += (b % 2) * spacing;
      p.push_back(row);
      if (truth) truth->push_back(b);
    }
  }
  return p;
}

// True when two labelings describe the same partition.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  }
  return true;
}

// Bilinear sample of a single-channel w x h grid at output pixel (ox, oy) of
// an ow x oh resize, half-pixel centres, edges clamped.
inline double bilinear(const std::vector<double>& src, int w, int h, int ow, int oh, int ox, int oy) {
  const double sx = std::clamp((ox + 0.5) * w / ow - 0.5, 0.0, w - 1.0);
  const double sy = std::clamp((oy + 0.5) * h / oh - 0.5, 0.0, h - 1.0);
  const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
  const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
  const double fx = sx - x0, fy = sy - y0;
  return (1 - fx) * (1 - fy) * src[y0 * w + x0] + fx * (1 - fy) * src[y0 * w + x1] +
         (1 - fx) * fy * src[y1 * w + x0] + fx * fy * src[y1 * w + x1];
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
inline std::vector<double> jacobi_eigenvalues(Points a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

// Population covariance.
inline Points covariance(const Points& x) {
  const std::size_t n = x.size(), d = x[0].size();
  std::vector<double> mean(d, 0.0);
  for (const auto& r : x)
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j] / n;
  Points c(d, std::vector<double>(d, 0.0));
  for (const auto& r : x)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) c[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]) / n;
  return c;
}

}  // namespace oracle
