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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "stylefilter/clustering.hpp"
#include "stylefilter/manifest.hpp"
#include "stylefilter/matrix.hpp"

namespace stylefilter {

struct LabeledCentroid {
  int cluster = 0;  // index within its own domain's clustering
  Domain domain = Domain::source;
  std::vector<double> vector;
  std::size_t member_count = 0;
};

// Centroids re-derived as the means of the points assigned to each cluster.
std::vector<LabeledCentroid> compute_centroids(const ClusteringResult& result,
                                               const Matrix& points, Domain domain);

/// All centroids under one global labeling: source clusters take labels
/// 0..k_src-1, target clusters k_src..k_src+k_tgt-1.
struct CentroidSet {
  int source_count = 0;
  int target_count = 0;
  Matrix vectors;
  std::vector<std::size_t> member_counts;

  static CentroidSet from(const std::vector<LabeledCentroid>& source,
                          const std::vector<LabeledCentroid>& target);

  int size() const { return source_count + target_count; }
  std::vector<int> labels() const;
  Domain domain_of(int label) const;
  bool is_source(int label) const { return label >= 0 && label < source_count; }
};

// A partition of global labels; parts sorted internally and ordered by their
// smallest label.
using Grouping = std::vector<std::vector<int>>;

Grouping canonical_grouping(Grouping g);
Grouping grouping_from_assignments(std::span<const int> assignments);

struct CentroidGrouping {
  int k = 0;
  Grouping grouping;
  double sse = 0.0;
  double silhouette = 0.0;
};

struct CentroidClustering {
  std::vector<CentroidGrouping> per_k;  // ascending k
};

struct CentroidClusteringOptions {
  std::uint64_t seed = 0;
  int restarts = 10;
  // Weight each centroid by its member count (off: one point per centroid).
  bool weighted = false;
};

// Throws ValidationError when a candidate lies outside [2, size-1].
CentroidClustering cluster_centroids(const CentroidSet& cs,
                                     std::span<const int> candidate_ks,
                                     const CentroidClusteringOptions& opts);

// The two candidates in [2, size-1] with the highest centroid silhouette,
// ascending (one when only one is feasible).
std::vector<int> auto_centroid_candidates(const CentroidSet& cs,
                                          const CentroidClusteringOptions& opts);

// Source labels whose part of the grouping holds no target label. Throws
// ValidationError when the grouping is not a partition of cs's labels.
std::set<int> isolated_source_labels(const Grouping& grouping, const CentroidSet& cs);
// Same, with the label space given by counts (source labels first).
std::set<int> isolated_source_labels(const Grouping& grouping, int source_count,
                                     int target_count);

enum class RemovalMode { all_k, any_k, single_k };

std::string_view to_string(RemovalMode m);
RemovalMode parse_removal_mode(std::string_view text);

// all_k: intersection over candidates; any_k: union; single_k: the set for
// `single_k` (or the only candidate). Throws ValidationError on an empty map.
std::set<int> decide_removal(const std::map<int, std::set<int>>& isolated_per_k,
                             RemovalMode mode, std::optional<int> single_k = {});

struct FilterOutcome {
  Manifest filtered;
  std::size_t kept = 0;
  std::size_t removed = 0;
  std::vector<std::string> removed_ids;
};

// Keeps the records whose cluster is not removed, in source order. The
// assignment is matched to records by id. Throws ValidationError for a record
// without an assignment, and refuses to remove the entire source domain.
FilterOutcome apply_filter(const Manifest& source,
                           std::span<const std::string> assignment_ids,
                           std::span<const int> assignments,
                           const std::set<int>& removed_clusters);

/// Everything the filtering decision depended on.
struct FilterReport {
  std::vector<int> candidate_ks;
  bool candidates_auto = false;
  std::map<int, Grouping> groupings;
  std::map<int, std::set<int>> isolated_per_k;
  std::set<int> removed_source_clusters;
  std::size_t kept = 0;
  std::size_t removed = 0;
  RemovalMode mode = RemovalMode::all_k;
  bool weighted = false;
  std::string output_manifest_path;
};

}  // namespace stylefilter
