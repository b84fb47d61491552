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

// Acceptance checks for the primary component. Prints one PASS/FAIL line per
// criterion and exits non-zero if any fails. Tolerances are pinned here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "stylefilter/clustering.hpp"
#include "stylefilter/extractor.hpp"
#include "stylefilter/fileio.hpp"
#include "stylefilter/filter.hpp"
#include "stylefilter/filterbank.hpp"
#include "stylefilter/hash.hpp"
#include "stylefilter/pipeline.hpp"
#include "stylefilter/projection.hpp"
#include "stylefilter/testkit.hpp"
#include "temp_dir.hpp"

using namespace stylefilter;
namespace fs = std::filesystem;

// TagCount has no comparison of its own.
namespace stylefilter {
bool operator==(const TagCount& a, const TagCount& b) { return a.kept == b.kept && a.removed == b.removed; }
}  // namespace stylefilter

namespace {

constexpr double kRetainFraction = 0.95;       // AC-1
constexpr double kRuntimeLimitSeconds = 120.0;  // AC-1
constexpr double kSseRelTol = 1e-9;             // AC-3
constexpr int kOracleMinMatches = 99;           // AC-3
constexpr double kSilhouetteTol = 1e-9;         // AC-4
constexpr double kSilhouetteExample = 0.99005;  // AC-4
constexpr double kSilhouetteExampleTol = 1e-5;  // AC-4
constexpr double kPcaRatioTol = 1e-9;           // AC-7

struct Outcome {
  bool pass = false;
  std::string detail;
};

Matrix to_matrix(const oracle::Points& p) { return Matrix::from_rows(p); }

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// Shared near/far benchmark: rendered once, used by AC-1, AC-6 and AC-8.
struct Bench {
  TempDir root;
  fs::path data = root / "data";
  Bench() { testkit::generate_benchmark(testkit::near_far_benchmark(data)); }

  PipelineConfig config(const std::string& out) const {
    PipelineConfig c;
    c.paths.source_manifest = data / "source.sfmanifest";
    c.paths.target_manifest = data / "target.sfmanifest";
    c.paths.output_dir = root / out;
    c.clustering.k_source = 3;
    c.clustering.k_target = 2;
    c.filter.centroid_candidate_ks = {2, 3};
    c.filter.mode = RemovalMode::all_k;
    return c;
  }
};

Bench& bench() {
  static Bench b;
  return b;
}

std::map<std::string, RunReport>& reports() {
  static std::map<std::string, RunReport> r;
  return r;
}

const RunReport& run_once(const std::string& out) {
  auto it = reports().find(out);
  if (it != reports().end()) return it->second;
  Pipeline p(bench().config(out));
  return reports()[out] = p.run();
}

Outcome ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunReport& r = run_once("run1");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto frac_kept = [&](const std::string& tag) {
    const auto& t = r.tag_echo.at(tag);
    return static_cast<double>(t.kept) / static_cast<double>(t.kept + t.removed);
  };
  const double c_removed = 1.0 - frac_kept("factory=C");
  const double a_kept = frac_kept("factory=A"), b_kept = frac_kept("factory=B");
  std::ostringstream d;
  d << "C removed " << c_removed << ", A kept " << a_kept << ", B kept " << b_kept << ", kept+removed "
    << r.filter.kept + r.filter.removed << ", " << secs << " s";
  const bool ok = c_removed >= kRetainFraction && a_kept >= kRetainFraction && b_kept >= kRetainFraction &&
                  !r.filter.removed_source_clusters.empty() && r.filter.kept + r.filter.removed == 300 &&
                  secs < kRuntimeLimitSeconds;
  return {ok, d.str()};
}

Outcome ac2() {
  const Grouping k2 = {{0, 1, 3, 5, 6, 7, 8, 9}, {2, 4}};
  const Grouping k4 = {{7}, {0, 3, 5, 8, 9}, {1, 6}, {2, 4}};
  const std::map<int, std::set<int>> iso{{2, isolated_source_labels(k2, 7, 3)}, {4, isolated_source_labels(k4, 7, 3)}};
  const auto all = decide_removal(iso, RemovalMode::all_k);
  const auto any = decide_removal(iso, RemovalMode::any_k);
  const bool ok = all == std::set<int>{2, 4} && any == std::set<int>{1, 2, 4, 6};
  return {ok, "all_k " + std::to_string(all.size()) + " labels, any_k " + std::to_string(any.size()) + " labels"};
}

Outcome ac3() {
  std::mt19937_64 g(20260101);
  int matched = 0, monotone = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const int n = 2 + static_cast<int>(g() % 7);
    const int k = 1 + static_cast<int>(g() % std::min(3, n));
    const auto p = oracle::random_points(g, n, 2);
    KMeansOptions o;
    o.k = k;
    o.seed = static_cast<std::uint64_t>(inst);
    o.restarts = 50;
    o.record_trace = true;
    const ClusteringResult r = kmeans(to_matrix(p), o);
    if (rel_diff(r.sse, oracle::brute_force_kmeans_sse(p, k)) <= kSseRelTol) ++matched;
    bool mono = true;
    for (const auto& trace : r.sse_trace) {
      for (std::size_t i = 1; i < trace.size(); ++i) mono = mono && trace[i] <= trace[i - 1] * (1 + 1e-12);
    }
    if (mono) ++monotone;
  }
  return {matched >= kOracleMinMatches && monotone == 100,
          std::to_string(matched) + "/100 optimal, " + std::to_string(monotone) + "/100 monotone"};
}

Outcome ac4() {
  std::mt19937_64 g(4242);
  int ok_count = 0;
  double worst = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const int n = 6 + static_cast<int>(g() % 40);
    const int k = 2 + static_cast<int>(g() % 4);
    const auto p = oracle::random_points(g, n, 3);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i < k ? i : static_cast<int>(g() % k);
    const double got = silhouette(to_matrix(p), labels).mean;
    const double want = oracle::naive_silhouette(p, labels);
    worst = std::max(worst, std::abs(got - want));
    if (std::abs(got - want) <= kSilhouetteTol) ++ok_count;
  }
  const double ex = silhouette(Matrix::from_rows({{0.0}, {0.1}, {10.0}, {10.1}}), std::vector<int>{0, 0, 1, 1}).mean;
  std::ostringstream d;
  d.precision(8);
  d << ok_count << "/50 within tol (worst " << worst << "), example mean " << ex << " vs pinned "
    << kSilhouetteExample;
  return {ok_count == 50 && std::abs(ex - kSilhouetteExample) <= kSilhouetteExampleTol, d.str()};
}

Outcome ac5() {
  FeatureMap m;
  m.tap = "t";
  m.tensor = Tensor3(1, 2, 2);
  m.tensor.values = {1, 3, 5, 7};
  const auto v = style_vector({m}, "x").values;
  bool ok = v.size() == 2 && v[0] == 4.0 && v[1] == 5.0;
  FeatureMap c = m;
  c.tensor = Tensor3(3, 5, 4, 2.5);
  for (std::size_t i = 3; i < 6; ++i) ok = ok && style_vector({c}, "x").values[i] == 0.0;

  ExtractorConfig cfg = ExtractorConfig::filterbank_defaults();
  cfg.input_height = cfg.input_width = 64;
  auto style_of = [&](const Tensor3& t) { return style_vector(extract_feature_maps(preprocess(t, cfg), cfg), "x").values; };
  auto dc_mean = [](int o) { return static_cast<std::size_t>(o) * 2 * filterbank::kChannels; };
  std::mt19937_64 g(55);
  int bright_ok = 0, contrast_ok = 0;
  for (int pair = 0; pair < 20; ++pair) {
    std::uniform_real_distribution<double> u(0.1, 0.6);
    Tensor3 base(1, 64, 64);
    for (auto& x : base.values) x = u(g);
    Tensor3 bright = base;
    const double b = std::uniform_real_distribution<double>(0.01, 0.3)(g);
    for (auto& x : bright.values) x += b;
    double mean = 0;
    for (double x : base.values) mean += x / static_cast<double>(base.values.size());
    Tensor3 strong = base;
    const double k = std::uniform_real_distribution<double>(1.05, 3.0)(g);
    for (auto& x : strong.values) x = mean + k * (x - mean);
    const auto s0 = style_of(base), s1 = style_of(bright), s2 = style_of(strong);
    bool bo = true, co = true;
    for (int o = 0; o < 3; ++o) {
      bo = bo && s0[dc_mean(o)] < s1[dc_mean(o)];
      co = co && s0[dc_mean(o) + filterbank::kChannels] < s2[dc_mean(o) + filterbank::kChannels];
    }
    bright_ok += bo;
    contrast_ok += co;
  }
  return {ok && bright_ok == 20 && contrast_ok == 20,
          "brightness " + std::to_string(bright_ok) + "/20, contrast " + std::to_string(contrast_ok) + "/20"};
}

Outcome ac6() {
  run_once("run1");
  const std::vector<std::string> artifacts{"style_source.sfstyle", "style_target.sfstyle", "clustering_source.sfclust",
                                           "clustering_target.sfclust", "filtered_source.sfmanifest"};
  std::map<std::string, std::string> first;
  for (const auto& a : artifacts) first[a] = to_hex(sha256(read_text_file(bench().root / "run1" / a)));

  Pipeline again(bench().config("run1"));
  const RunReport r = again.run();

  // A fresh directory with the same config must reproduce the same bytes.
  run_once("run2");
  int identical = 0;
  for (const auto& a : artifacts) {
    const std::string again_hash = to_hex(sha256(read_text_file(bench().root / "run1" / a)));
    const std::string fresh_hash = to_hex(sha256(read_text_file(bench().root / "run2" / a)));
    identical += again_hash == first[a] && fresh_hash == first[a];
  }
  std::ostringstream d;
  d << identical << "/" << artifacts.size() << " artifacts identical, second run extractions "
    << r.counters.extractions << " clusterings " << r.counters.clusterings;
  return {identical == static_cast<int>(artifacts.size()) && r.counters.extractions == 0 &&
              r.counters.clusterings == 0,
          d.str()};
}

Outcome ac7() {
  oracle::Points line;
  for (int i = 0; i < 30; ++i) line.push_back({0.5 * i, -1.5 * i, 2.0 * i});
  const double ratio = pca_project(to_matrix(line)).explained_variance_ratio[0];

  std::mt19937_64 g(77);
  std::vector<int> truth;
  const Matrix blobs = to_matrix(oracle::blobs(g, 3, 40, 8, 0.5, 15.0, &truth));
  TsneParams tp;
  tp.perplexity = 15;
  tp.seed = 1;
  const auto t = tsne_project(blobs, tp);
  KMeansOptions o;
  o.k = 3;
  const auto km = kmeans(t.coords, o);
  const bool recovered = oracle::same_partition(km.assignments, truth);
  std::ostringstream d;
  d << "pca ratio " << ratio << ", blobs " << (recovered ? "recovered" : "mixed") << ", kl " << t.initial_kl
    << " -> " << t.final_kl;
  return {ratio >= 1 - kPcaRatioTol && recovered && t.final_kl < t.initial_kl, d.str()};
}

std::string decision_digest(const FilterReport& f) {
  std::ostringstream s;
  for (const auto& [k, g] : f.groupings) {
    s << k << ":";
    for (const auto& part : g) {
      for (int l : part) s << l << ",";
      s << "|";
    }
  }
  for (const auto& [k, iso] : f.isolated_per_k) {
    s << k << "=";
    for (int l : iso) s << l << ",";
  }
  for (int l : f.removed_source_clusters) s << "r" << l;
  s << "kept" << f.kept << "removed" << f.removed;
  return to_hex(sha256(s.str()));
}

Outcome ac8() {
  const RunReport& plain = run_once("run1");
  Manifest m = read_manifest(bench().data / "source.sfmanifest");
  std::mt19937_64 g(8);
  for (auto& r : m.records) r.class_tags = {"scrambled=" + std::to_string(g() % 5)};
  m = make_manifest(Domain::source, m.records, m.created_at);
  const fs::path scrambled = bench().data / "scrambled.sfmanifest";
  write_manifest(m, scrambled);
  PipelineConfig c = bench().config("scrambled");
  c.paths.source_manifest = scrambled;
  Pipeline p(c);
  const RunReport r = p.run();
  fs::remove(scrambled);

  const std::string a = decision_digest(plain.filter), b = decision_digest(r.filter);
  const auto kept_ids = [](const fs::path& manifest) {
    std::string ids;
    for (const auto& rec : read_manifest(manifest).records) ids += rec.id + "\n";
    return to_hex(sha256(ids));
  };
  const bool same_kept = kept_ids(bench().root / "run1" / "filtered_source.sfmanifest") ==
                         kept_ids(bench().root / "scrambled" / "filtered_source.sfmanifest");
  return {a == b && same_kept && r.tag_echo != plain.tag_echo,
          "decision digest " + a.substr(0, 12) + (a == b ? " == " : " != ") + b.substr(0, 12)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC-1 end-to-end synthetic filter", ac1}, {"AC-2 grouping replay", ac2},
      {"AC-3 k-means oracle", ac3},              {"AC-4 silhouette reference", ac4},
      {"AC-5 style statistics", ac5},            {"AC-6 determinism and re-use", ac6},
      {"AC-7 projection sanity", ac7},           {"AC-8 label freedom", ac8},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s (%s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
