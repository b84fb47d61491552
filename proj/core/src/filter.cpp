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

#include "stylefilter/filter.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <string>
#include <unordered_map>

#include "stylefilter/error.hpp"
#include "stylefilter/rng.hpp"

namespace stylefilter {

std::vector<LabeledCentroid> compute_centroids(const ClusteringResult& result, const Matrix& points,
                                               Domain domain) {
  if (result.assignments.size() != points.rows()) {
    throw ValidationError("compute_centroids: assignment count differs from point count");
  }
  std::vector<LabeledCentroid> out(static_cast<std::size_t>(result.k));
  for (int c = 0; c < result.k; ++c) {
    out[static_cast<std::size_t>(c)].cluster = c;
    out[static_cast<std::size_t>(c)].domain = domain;
    out[static_cast<std::size_t>(c)].vector.assign(points.cols(), 0.0);
  }
  for (std::size_t i = 0; i < points.rows(); ++i) {
    auto& lc = out[static_cast<std::size_t>(result.assignments[i])];
    const auto row = points.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) lc.vector[j] += row[j];
    ++lc.member_count;
  }
  for (auto& lc : out) {
    if (lc.member_count == 0) {
      throw ValidationError("compute_centroids: cluster " + std::to_string(lc.cluster) + " is empty");
    }
    for (auto& v : lc.vector) v /= static_cast<double>(lc.member_count);
  }
  return out;
}

CentroidSet CentroidSet::from(const std::vector<LabeledCentroid>& source,
                              const std::vector<LabeledCentroid>& target) {
  CentroidSet cs;
  cs.source_count = static_cast<int>(source.size());
  cs.target_count = static_cast<int>(target.size());
  std::vector<std::vector<double>> rows;
  for (const auto* group : {&source, &target}) {
    for (const auto& c : *group) {
      rows.push_back(c.vector);
      cs.member_counts.push_back(c.member_count);
    }
  }
  cs.vectors = Matrix::from_rows(rows);
  return cs;
}

std::vector<int> CentroidSet::labels() const {
  std::vector<int> l(static_cast<std::size_t>(size()));
  for (int i = 0; i < size(); ++i) l[static_cast<std::size_t>(i)] = i;
  return l;
}

Domain CentroidSet::domain_of(int label) const {
  if (label < 0 || label >= size()) throw ValidationError("centroid label " + std::to_string(label) + " out of range");
  return label < source_count ? Domain::source : Domain::target;
}

Grouping canonical_grouping(Grouping g) {
  for (auto& part : g) std::sort(part.begin(), part.end());
  std::erase_if(g, [](const auto& part) { return part.empty(); });
  std::sort(g.begin(), g.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return g;
}

Grouping grouping_from_assignments(std::span<const int> assignments) {
  std::map<int, std::vector<int>> parts;
  for (std::size_t i = 0; i < assignments.size(); ++i) parts[assignments[i]].push_back(static_cast<int>(i));
  Grouping g;
  for (auto& [c, members] : parts) g.push_back(std::move(members));
  return canonical_grouping(std::move(g));
}

CentroidClustering cluster_centroids(const CentroidSet& cs, std::span<const int> candidate_ks,
                                     const CentroidClusteringOptions& opts) {
  if (candidate_ks.empty()) throw ValidationError("cluster_centroids: no candidate k");
  const int n = cs.size();
  std::vector<int> ks(candidate_ks.begin(), candidate_ks.end());
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  CentroidClustering out;
  for (int k : ks) {
    if (k < 2 || k > n - 1) {
      throw ValidationError("centroid candidate k=" + std::to_string(k) + " outside [2, " + std::to_string(n - 1) +
                            "] for " + std::to_string(n) + " centroids");
    }
    KMeansOptions ko;
    ko.k = k;
    ko.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(k));
    ko.restarts = opts.restarts;
    if (opts.weighted) {
      for (std::size_t c : cs.member_counts) ko.weights.push_back(static_cast<double>(c));
    }
    const ClusteringResult r = kmeans(cs.vectors, ko);
    CentroidGrouping g;
    g.k = k;
    g.grouping = grouping_from_assignments(r.assignments);
    g.sse = r.sse;
    g.silhouette = silhouette(cs.vectors, r.assignments).mean;
    out.per_k.push_back(std::move(g));
  }
  return out;
}

std::vector<int> auto_centroid_candidates(const CentroidSet& cs, const CentroidClusteringOptions& opts) {
  const int n = cs.size();
  if (n < 3) {
    throw ValidationError("centroid clustering needs at least 3 centroids (have " + std::to_string(n) + ")");
  }
  std::vector<int> all;
  for (int k = 2; k <= n - 1; ++k) all.push_back(k);
  if (all.size() == 1) return all;
  const CentroidClustering cc = cluster_centroids(cs, all, opts);
  std::vector<const CentroidGrouping*> ranked;
  for (const auto& g : cc.per_k) ranked.push_back(&g);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto* a, const auto* b) { return a->silhouette > b->silhouette; });
  std::vector<int> top{ranked[0]->k, ranked[1]->k};
  std::sort(top.begin(), top.end());
  return top;
}

std::set<int> isolated_source_labels(const Grouping& grouping, int source_count, int target_count) {
  const int n = source_count + target_count;
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  for (const auto& part : grouping) {
    if (part.empty()) throw ValidationError("malformed partition: empty part");
    for (int l : part) {
      if (l < 0 || l >= n) throw ValidationError("malformed partition: label " + std::to_string(l) + " out of range");
      if (seen[static_cast<std::size_t>(l)]++) {
        throw ValidationError("malformed partition: label " + std::to_string(l) + " appears twice");
      }
    }
  }
  for (int l = 0; l < n; ++l) {
    if (!seen[static_cast<std::size_t>(l)]) {
      throw ValidationError("malformed partition: label " + std::to_string(l) + " missing");
    }
  }
  std::set<int> isolated;
  for (const auto& part : grouping) {
    const bool has_target = std::any_of(part.begin(), part.end(), [&](int l) { return l >= source_count; });
    if (has_target) continue;
    isolated.insert(part.begin(), part.end());
  }
  return isolated;
}

std::set<int> isolated_source_labels(const Grouping& grouping, const CentroidSet& cs) {
  return isolated_source_labels(grouping, cs.source_count, cs.target_count);
}

std::string_view to_string(RemovalMode m) {
  switch (m) {
    case RemovalMode::all_k: return "all_k";
    case RemovalMode::any_k: return "any_k";
    case RemovalMode::single_k: return "single_k";
  }
  return "all_k";
}

RemovalMode parse_removal_mode(std::string_view text) {
  if (text == "all_k") return RemovalMode::all_k;
  if (text == "any_k") return RemovalMode::any_k;
  if (text == "single_k") return RemovalMode::single_k;
  throw ConfigError("unknown removal mode '" + std::string(text) + "' (expected all_k, any_k or single_k)");
}

std::set<int> decide_removal(const std::map<int, std::set<int>>& isolated_per_k, RemovalMode mode,
                             std::optional<int> single_k) {
  if (isolated_per_k.empty()) throw ValidationError("decide_removal: no candidate k evaluated");
  switch (mode) {
    case RemovalMode::all_k: {
      std::set<int> acc = isolated_per_k.begin()->second;
      for (const auto& [k, s] : isolated_per_k) {
        std::set<int> next;
        std::set_intersection(acc.begin(), acc.end(), s.begin(), s.end(), std::inserter(next, next.end()));
        acc = std::move(next);
      }
      return acc;
    }
    case RemovalMode::any_k: {
      std::set<int> acc;
      for (const auto& [k, s] : isolated_per_k) acc.insert(s.begin(), s.end());
      return acc;
    }
    case RemovalMode::single_k: {
      if (!single_k) {
        if (isolated_per_k.size() != 1) {
          throw ValidationError("decide_removal: single_k mode needs a k when several candidates were evaluated");
        }
        return isolated_per_k.begin()->second;
      }
      const auto it = isolated_per_k.find(*single_k);
      if (it == isolated_per_k.end()) {
        throw ValidationError("decide_removal: k=" + std::to_string(*single_k) + " was not evaluated");
      }
      return it->second;
    }
  }
  return {};
}

FilterOutcome apply_filter(const Manifest& source, std::span<const std::string> assignment_ids,
                           std::span<const int> assignments, const std::set<int>& removed_clusters) {
  if (assignment_ids.size() != assignments.size()) {
    throw ValidationError("apply_filter: ids and assignments disagree");
  }
  std::unordered_map<std::string_view, int> cluster_of;
  for (std::size_t i = 0; i < assignment_ids.size(); ++i) cluster_of.emplace(assignment_ids[i], assignments[i]);

  FilterOutcome out;
  std::vector<ImageRecord> kept;
  for (const auto& r : source.records) {
    const auto it = cluster_of.find(r.id);
    if (it == cluster_of.end()) {
      throw ValidationError("record " + r.id + " has no cluster assignment (style cache and manifest disagree)");
    }
    if (removed_clusters.contains(it->second)) {
      out.removed_ids.push_back(r.id);
    } else {
      kept.push_back(r);
    }
  }
  if (kept.empty() && !source.records.empty()) {
    throw ValidationError("filter would remove entire source domain");
  }
  out.kept = kept.size();
  out.removed = out.removed_ids.size();
  out.filtered = make_manifest(source.domain, std::move(kept), source.created_at);
  return out;
}

}  // namespace stylefilter
