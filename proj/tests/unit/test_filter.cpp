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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "stylefilter/clustering.hpp"
#include "stylefilter/error.hpp"
#include "stylefilter/filter.hpp"

using namespace stylefilter;

namespace {

const Grouping kSevenThreeK2 = {{0, 1, 3, 5, 6, 7, 8, 9}, {2, 4}};
const Grouping kSevenThreeK4 = {{7}, {0, 3, 5, 8, 9}, {1, 6}, {2, 4}};

// Ten centroids (seven source, three target) laid out so that k=2 separates
// {2,4} and k=4 additionally splits off {7} and {1,6}.
CentroidSet seven_three_geometry() {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  auto at = [&](double x, double y) { return std::vector<double>{x + jitter(g), y + jitter(g)}; };
  std::vector<std::vector<double>> rows(10);
  for (int l : {0, 3, 5, 8, 9}) rows[l] = at(0, 0);
  for (int l : {1, 6}) rows[l] = at(6, 0);
  rows[7] = at(0, 6);
  for (int l : {2, 4}) rows[l] = at(60, 60);
  std::vector<LabeledCentroid> src, tgt;
  for (int l = 0; l < 10; ++l) {
    LabeledCentroid c{l < 7 ? l : l - 7, l < 7 ? Domain::source : Domain::target, rows[l], 10};
    (l < 7 ? src : tgt).push_back(c);
  }
  return CentroidSet::from(src, tgt);
}

Manifest source_manifest(int n, std::mt19937_64* g = nullptr) {
  std::vector<ImageRecord> recs;
  for (int i = 0; i < n; ++i) {
    ImageRecord r{make_record_id(Domain::source, static_cast<std::size_t>(i)), "img" + std::to_string(i) + ".png",
                  Domain::source, {}, 8, 8};
    if (g) r.class_tags = {"tag" + std::to_string((*g)() % 4)};
    recs.push_back(r);
  }
  return make_manifest(Domain::source, std::move(recs), "2026-01-01T00:00:00Z");
}

std::vector<std::string> ids_of(const Manifest& m) {
  std::vector<std::string> ids;
  for (const auto& r : m.records) ids.push_back(r.id);
  return ids;
}

}  // namespace

TEST(Centroids, MeanOfMembers) {
  ClusteringResult r;
  r.k = 2;
  r.assignments = {0, 0, 1};
  const Matrix p = Matrix::from_rows({{1, 1}, {3, 3}, {7, 9}});
  const auto c = compute_centroids(r, p, Domain::source);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].vector, (std::vector<double>{2, 2}));
  EXPECT_EQ(c[0].member_count, 2u);
  EXPECT_EQ(c[1].vector, (std::vector<double>{7, 9}));
}

TEST(Centroids, AgreeWithClusteringResult) {
  std::mt19937_64 g(4);
  const Matrix p = Matrix::from_rows(oracle::random_points(g, 40, 3));
  for (int k : {1, 3, 5}) {
    KMeansOptions o;
    o.k = k;
    o.seed = 2;
    const ClusteringResult r = kmeans(p, o);
    const auto c = compute_centroids(r, p, Domain::target);
    for (int j = 0; j < k; ++j) {
      for (std::size_t d = 0; d < 3; ++d) {
        EXPECT_NEAR(c[static_cast<std::size_t>(j)].vector[d], r.centroids(static_cast<std::size_t>(j), d), 1e-6);
      }
    }
  }
}

TEST(CentroidSet, GlobalLabelling) {
  const CentroidSet cs = seven_three_geometry();
  EXPECT_EQ(cs.size(), 10);
  EXPECT_EQ(cs.labels(), (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
  for (int l = 0; l < 7; ++l) EXPECT_EQ(cs.domain_of(l), Domain::source);
  for (int l = 7; l < 10; ++l) EXPECT_EQ(cs.domain_of(l), Domain::target);
  EXPECT_THROW(cs.domain_of(10), ValidationError);
}

TEST(Grouping, CanonicalForm) {
  EXPECT_EQ(canonical_grouping({{9, 2}, {4, 0}}), (Grouping{{0, 4}, {2, 9}}));
  EXPECT_EQ(grouping_from_assignments(std::vector<int>{1, 0, 1, 2}), (Grouping{{0, 2}, {1}, {3}}));
}

TEST(Isolated, SevenSourceThreeTarget) {
  EXPECT_EQ(isolated_source_labels(kSevenThreeK2, 7, 3), (std::set<int>{2, 4}));
  EXPECT_EQ(isolated_source_labels(kSevenThreeK4, 7, 3), (std::set<int>{1, 2, 4, 6}));
}

TEST(Isolated, EveryPartHasTarget) {
  EXPECT_TRUE(isolated_source_labels(Grouping{{0, 2}, {1, 3}}, 2, 2).empty());
}

TEST(Isolated, MalformedPartitions) {
  EXPECT_THROW(isolated_source_labels(Grouping{{0, 1}, {1, 2}}, 2, 1), ValidationError);
  EXPECT_THROW(isolated_source_labels(Grouping{{0, 1}}, 2, 1), ValidationError);
  EXPECT_THROW(isolated_source_labels(Grouping{{0, 1, 2, 3}}, 2, 1), ValidationError);
  EXPECT_THROW(isolated_source_labels(Grouping{{0, 1}, {}, {2}}, 2, 1), ValidationError);
}

TEST(Decide, IntersectionAndUnion) {
  const std::map<int, std::set<int>> iso{{2, {2, 4}}, {4, {1, 2, 4, 6}}};
  EXPECT_EQ(decide_removal(iso, RemovalMode::all_k), (std::set<int>{2, 4}));
  EXPECT_EQ(decide_removal(iso, RemovalMode::any_k), (std::set<int>{1, 2, 4, 6}));
  EXPECT_EQ(decide_removal(iso, RemovalMode::single_k, 4), (std::set<int>{1, 2, 4, 6}));
  EXPECT_THROW(decide_removal(iso, RemovalMode::single_k), ValidationError);
  EXPECT_THROW(decide_removal(iso, RemovalMode::single_k, 3), ValidationError);
  EXPECT_THROW(decide_removal({}, RemovalMode::all_k), ValidationError);
}

TEST(Decide, SingleCandidateIdentity) {
  const std::map<int, std::set<int>> iso{{3, {0, 5}}};
  EXPECT_EQ(decide_removal(iso, RemovalMode::single_k), (std::set<int>{0, 5}));
}

TEST(Decide, ModeMonotonicityProperty) {
  std::mt19937_64 g(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<int, std::set<int>> iso;
    const int nk = 1 + static_cast<int>(g() % 4);
    for (int i = 0; i < nk; ++i) {
      std::set<int> s;
      for (int l = 0; l < 8; ++l) {
        if (g() % 2) s.insert(l);
      }
      iso[2 + i] = s;
    }
    const auto all = decide_removal(iso, RemovalMode::all_k);
    const auto any = decide_removal(iso, RemovalMode::any_k);
    for (const auto& [k, s] : iso) {
      const auto one = decide_removal(iso, RemovalMode::single_k, k);
      EXPECT_TRUE(std::includes(one.begin(), one.end(), all.begin(), all.end()));
      EXPECT_TRUE(std::includes(any.begin(), any.end(), one.begin(), one.end()));
    }
  }
}

TEST(Decide, ModeNames) {
  for (auto m : {RemovalMode::all_k, RemovalMode::any_k, RemovalMode::single_k}) {
    EXPECT_EQ(parse_removal_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_removal_mode("most_k"), ConfigError);
}

TEST(ClusterCentroids, ReproducesReferenceGroupings) {
  const CentroidSet cs = seven_three_geometry();
  const CentroidClustering cc = cluster_centroids(cs, std::vector<int>{2, 4}, {.seed = 1, .restarts = 10});
  ASSERT_EQ(cc.per_k.size(), 2u);
  EXPECT_EQ(cc.per_k[0].k, 2);
  EXPECT_EQ(cc.per_k[0].grouping, canonical_grouping(kSevenThreeK2));
  EXPECT_EQ(cc.per_k[1].grouping, canonical_grouping(kSevenThreeK4));
  std::map<int, std::set<int>> iso;
  for (const auto& g : cc.per_k) iso[g.k] = isolated_source_labels(g.grouping, cs);
  EXPECT_EQ(decide_removal(iso, RemovalMode::all_k), (std::set<int>{2, 4}));
}

TEST(ClusterCentroids, CandidateRange) {
  const CentroidSet cs = seven_three_geometry();
  EXPECT_THROW(cluster_centroids(cs, std::vector<int>{1}, {}), ValidationError);
  EXPECT_THROW(cluster_centroids(cs, std::vector<int>{10}, {}), ValidationError);
  EXPECT_THROW(cluster_centroids(cs, std::vector<int>{}, {}), ValidationError);
  EXPECT_NO_THROW(cluster_centroids(cs, std::vector<int>{9}, {}));
}

TEST(ClusterCentroids, CoincidentPairs) {
  std::vector<LabeledCentroid> src{{0, Domain::source, {0, 0}, 1}, {1, Domain::source, {50, 50}, 1}};
  std::vector<LabeledCentroid> tgt{{0, Domain::target, {0, 0}, 1}, {1, Domain::target, {50, 50}, 1}};
  const CentroidSet cs = CentroidSet::from(src, tgt);
  const auto cc = cluster_centroids(cs, std::vector<int>{2}, {});
  EXPECT_EQ(cc.per_k[0].grouping, (Grouping{{0, 2}, {1, 3}}));
  EXPECT_DOUBLE_EQ(cc.per_k[0].silhouette, 1.0);
}

TEST(ClusterCentroids, WeightingIsOptIn) {
  // Points 0, 0.9, 2 with member counts 1000, 1, 1: unweighted k=2 pairs the
  // two sources; weighting by members pulls label 1 towards the target.
  std::vector<LabeledCentroid> src{{0, Domain::source, {0.0}, 1000}, {1, Domain::source, {0.9}, 1}};
  std::vector<LabeledCentroid> tgt{{0, Domain::target, {2.0}, 1}};
  const CentroidSet cs = CentroidSet::from(src, tgt);
  const auto plain = cluster_centroids(cs, std::vector<int>{2}, {.seed = 1, .restarts = 10, .weighted = false});
  const auto weighted = cluster_centroids(cs, std::vector<int>{2}, {.seed = 1, .restarts = 10, .weighted = true});
  EXPECT_EQ(plain.per_k[0].grouping, (Grouping{{0, 1}, {2}}));
  EXPECT_EQ(weighted.per_k[0].grouping, (Grouping{{0}, {1, 2}}));
}

TEST(ClusterCentroids, AutoCandidatesAreTopTwoBySilhouette) {
  const CentroidSet cs = seven_three_geometry();
  const auto ks = auto_centroid_candidates(cs, {.seed = 1, .restarts = 10});
  ASSERT_EQ(ks.size(), 2u);
  EXPECT_LT(ks[0], ks[1]);
  const auto all = cluster_centroids(cs, std::vector<int>{2, 3, 4, 5, 6, 7, 8, 9}, {.seed = 1, .restarts = 10});
  std::vector<double> sil;
  for (const auto& g : all.per_k) sil.push_back(g.silhouette);
  std::sort(sil.rbegin(), sil.rend());
  for (int k : ks) EXPECT_GE(all.per_k[static_cast<std::size_t>(k - 2)].silhouette, sil[1]);
}

TEST(ApplyFilter, NothingRemovedIsIdentity) {
  const Manifest m = source_manifest(5);
  const std::vector<int> a{0, 1, 0, 1, 2};
  const FilterOutcome out = apply_filter(m, ids_of(m), a, {});
  EXPECT_EQ(out.filtered, m);
  EXPECT_EQ(out.kept, 5u);
  EXPECT_EQ(out.removed, 0u);
}

TEST(ApplyFilter, RemovingEverythingIsRefused) {
  const Manifest m = source_manifest(4);
  const std::vector<int> a{0, 1, 0, 1};
  try {
    apply_filter(m, ids_of(m), a, {0, 1});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "filter would remove entire source domain");
  }
}

TEST(ApplyFilter, MissingAssignmentIsError) {
  const Manifest m = source_manifest(3);
  std::vector<std::string> ids = ids_of(m);
  ids.pop_back();
  const std::vector<int> a{0, 1};
  EXPECT_THROW(apply_filter(m, ids, a, {0}), ValidationError);
}

TEST(ApplyFilter, SubsequenceAndCountsProperty) {
  std::mt19937_64 g(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(g() % 30);
    const int k = 1 + static_cast<int>(g() % 5);
    const Manifest m = source_manifest(n);
    std::vector<int> a(static_cast<std::size_t>(n));
    for (auto& x : a) x = static_cast<int>(g() % k);
    std::set<int> removed;
    for (int c = 0; c < k; ++c) {
      if (g() % 2) removed.insert(c);
    }
    // Assignments listed in a shuffled order: matched by id, not position.
    std::vector<std::size_t> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), g);
    std::vector<std::string> ids;
    std::vector<int> pa;
    for (std::size_t i : perm) {
      ids.push_back(m.records[i].id);
      pa.push_back(a[i]);
    }
    std::size_t expect_kept = 0;
    for (int x : a) expect_kept += removed.count(x) ? 0 : 1;
    if (expect_kept == 0) {
      EXPECT_THROW(apply_filter(m, ids, pa, removed), ValidationError);
      continue;
    }
    const FilterOutcome out = apply_filter(m, ids, pa, removed);
    EXPECT_EQ(out.kept + out.removed, static_cast<std::size_t>(n));
    EXPECT_EQ(out.kept, expect_kept);
    // Kept records appear in source order.
    std::size_t pos = 0;
    for (const auto& r : out.filtered.records) {
      while (pos < m.records.size() && m.records[pos].id != r.id) ++pos;
      ASSERT_LT(pos, m.records.size());
      EXPECT_EQ(removed.count(a[pos]), 0u);
    }
    EXPECT_EQ(out.filtered.created_at, m.created_at);
  }
}

TEST(ApplyFilter, TagsDoNotInfluenceDecision) {
  std::mt19937_64 g(8);
  const Manifest plain = source_manifest(20);
  const Manifest tagged = source_manifest(20, &g);
  std::vector<int> a(20);
  for (auto& x : a) x = static_cast<int>(g() % 3);
  const auto x = apply_filter(plain, ids_of(plain), a, {1});
  const auto y = apply_filter(tagged, ids_of(tagged), a, {1});
  EXPECT_EQ(x.removed_ids, y.removed_ids);
  EXPECT_EQ(x.kept, y.kept);
}
