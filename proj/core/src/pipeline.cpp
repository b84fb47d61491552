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

#include "stylefilter/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "stylefilter/cluster_io.hpp"
#include "stylefilter/error.hpp"
#include "stylefilter/filter.hpp"
#include "stylefilter/hash.hpp"
#include "stylefilter/projection.hpp"
#include "stylefilter/rng.hpp"
#include "stylefilter/style_cache.hpp"
#include "stylefilter/testkit.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace stylefilter {

fs::path ArtifactPaths::style_cache(Domain d) const {
  return root / ("style_" + std::string(to_string(d)) + ".sfstyle");
}
fs::path ArtifactPaths::diagnostics_table(Domain d) const {
  return root / ("diagnostics_" + std::string(to_string(d)) + ".tsv");
}
fs::path ArtifactPaths::diagnostics_summary(Domain d) const {
  return root / ("diagnostics_" + std::string(to_string(d)) + ".json");
}
fs::path ArtifactPaths::clustering(Domain d) const {
  return root / ("clustering_" + std::string(to_string(d)) + ".sfclust");
}
fs::path ArtifactPaths::centroids() const { return root / "centroids.tsv"; }
fs::path ArtifactPaths::filter_state() const { return root / "filter_state.json"; }
fs::path ArtifactPaths::filtered_manifest() const { return root / "filtered_source.sfmanifest"; }
fs::path ArtifactPaths::report() const { return root / "report.json"; }
fs::path ArtifactPaths::synth_stamp() const { return root / "synth.stamp"; }
fs::path ArtifactPaths::projection(const std::string& subject, ProjectionMethod m, const std::string& ext) const {
  return root / ("projection_" + subject + "_" + std::string(to_string(m)) + "." + ext);
}

ProjectionSubject parse_projection_subject(std::string_view text) {
  if (text == "source") return ProjectionSubject::source;
  if (text == "target") return ProjectionSubject::target;
  if (text == "centroids") return ProjectionSubject::centroids;
  throw ValidationError("unknown projection subject '" + std::string(text) + "' (source|target|centroids)");
}

namespace {

std::string_view subject_name(ProjectionSubject s) {
  switch (s) {
    case ProjectionSubject::source: return "source";
    case ProjectionSubject::target: return "target";
    case ProjectionSubject::centroids: return "centroids";
  }
  return "?";
}

std::string num(double v) {
  return fmt::format("{}", v);  // shortest round-trip form
}

// Stage keys: hex SHA-256 over '\n'-joined fields.
std::string make_key(std::initializer_list<std::string> parts) {
  Sha256 h;
  for (const auto& p : parts) {
    h.update(p);
    h.update(std::string_view("\n", 1));
  }
  return to_hex(h.finish());
}

std::string file_hash(const fs::path& p) { return to_hex(sha256_file(p)); }

std::string read_key(const fs::path& p) {
  if (!fs::exists(p)) return {};
  try {
    std::string s = read_text_file(p);
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
  } catch (const Error&) {
    return {};
  }
}

fs::path key_path(const fs::path& artifact) { return artifact.string() + ".key"; }

template <typename F>
auto in_stage(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

KDiagnostics read_diagnostics(const fs::path& table, const fs::path& summary) {
  KDiagnostics d;
  std::istringstream in(read_text_file(table));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string k, sse, sil;
    if (!std::getline(row, k, '\t') || !std::getline(row, sse, '\t') || !std::getline(row, sil)) {
      throw CorruptError("diagnostics table " + table.string() + ": malformed row");
    }
    d.candidate_ks.push_back(std::stoi(k));
    d.sse_curve.push_back(std::stod(sse));
    d.silhouette_curve.push_back(std::stod(sil));
  }
  const json s = json::parse(read_text_file(summary));
  d.suggested_k_silhouette = s.at("suggested_k_silhouette").get<int>();
  if (!s.at("suggested_k_elbow").is_null()) d.suggested_k_elbow = s.at("suggested_k_elbow").get<int>();
  return d;
}

std::string format_centroids(const CentroidSet& cs) {
  std::string out = "label\tdomain\tcluster\tmembers\tvector\n";
  for (int l = 0; l < cs.size(); ++l) {
    const int cluster = cs.is_source(l) ? l : l - cs.source_count;
    out += std::to_string(l) + "\t" + std::string(to_string(cs.domain_of(l))) + "\t" + std::to_string(cluster) +
           "\t" + std::to_string(cs.member_counts[static_cast<std::size_t>(l)]) + "\t";
    const auto row = cs.vectors.row(static_cast<std::size_t>(l));
    for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + num(row[j]);
    out += "\n";
  }
  return out;
}

json filter_state_json(const FilterReport& f, const std::string& key) {
  json j;
  j["input_key"] = key;
  j["candidate_ks"] = f.candidate_ks;
  j["candidates_auto"] = f.candidates_auto;
  json groupings = json::object();
  for (const auto& [k, g] : f.groupings) groupings[std::to_string(k)] = g;
  j["groupings"] = groupings;
  json isolated = json::object();
  for (const auto& [k, s] : f.isolated_per_k) isolated[std::to_string(k)] = std::vector<int>(s.begin(), s.end());
  j["isolated_per_k"] = isolated;
  j["removed_source_clusters"] = std::vector<int>(f.removed_source_clusters.begin(), f.removed_source_clusters.end());
  j["kept"] = f.kept;
  j["removed"] = f.removed;
  j["mode"] = std::string(to_string(f.mode));
  j["weighted"] = f.weighted;
  return j;
}

FilterReport filter_state_from_json(const json& j) {
  FilterReport f;
  f.candidate_ks = j.at("candidate_ks").get<std::vector<int>>();
  f.candidates_auto = j.at("candidates_auto").get<bool>();
  for (const auto& [k, g] : j.at("groupings").items()) f.groupings[std::stoi(k)] = g.get<Grouping>();
  for (const auto& [k, s] : j.at("isolated_per_k").items()) {
    const auto v = s.get<std::vector<int>>();
    f.isolated_per_k[std::stoi(k)] = std::set<int>(v.begin(), v.end());
  }
  const auto removed = j.at("removed_source_clusters").get<std::vector<int>>();
  f.removed_source_clusters = std::set<int>(removed.begin(), removed.end());
  f.kept = j.at("kept").get<std::size_t>();
  f.removed = j.at("removed").get<std::size_t>();
  f.mode = parse_removal_mode(j.at("mode").get<std::string>());
  f.weighted = j.at("weighted").get<bool>();
  return f;
}

}  // namespace

struct Pipeline::Loaded {
  Manifest manifest[2];
  fs::path base_dir[2];
  StyleVectorSet vectors[2];
  Matrix points[2];    // clustering space (standardized when configured)
  std::string space_key;
};

Pipeline::Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.paths.synth_spec && (cfg_.paths.source_manifest.empty() || cfg_.paths.target_manifest.empty())) {
    const fs::path spec_path = *cfg_.paths.synth_spec;
    const auto spec = in_stage("synth", [&] {
      return testkit::parse_synth_spec(read_text_file(spec_path), spec_path.parent_path());
    });
    if (cfg_.paths.source_manifest.empty()) cfg_.paths.source_manifest = spec.output_dir / "source.sfmanifest";
    if (cfg_.paths.target_manifest.empty()) cfg_.paths.target_manifest = spec.output_dir / "target.sfmanifest";
  }
  cfg_.validate();
  paths_.root = cfg_.paths.output_dir;
}

Pipeline::~Pipeline() = default;

void Pipeline::log(const std::string& message) const {
  if (cfg_.verbose) std::cerr << "[stylefilter] " << message << "\n";
}

void Pipeline::acquire_lock() {
  if (lock_) return;
  in_stage("lock", [&] {
    fs::create_directories(paths_.root);
    lock_ = std::make_unique<DirectoryLock>(paths_.root);
  });
}

void Pipeline::mark(const std::string& stage, bool ran) {
  (ran ? counters_.stages_run : counters_.stages_skipped).push_back(stage);
  log(stage + (ran ? ": ran" : ": up to date, skipped"));
}

void Pipeline::synth() {
  acquire_lock();
  if (!cfg_.paths.synth_spec) throw StageError("synth", "no [paths] synth_spec configured");
  in_stage("synth", [&] {
    const fs::path spec_path = *cfg_.paths.synth_spec;
    const auto spec = testkit::parse_synth_spec(read_text_file(spec_path), spec_path.parent_path());
    const std::string key = make_key({"synth v1", format_synth_spec(spec), spec.output_dir.string()});
    const fs::path src = spec.output_dir / "source.sfmanifest";
    const fs::path tgt = spec.output_dir / "target.sfmanifest";
    if (read_key(paths_.synth_stamp()) == key && fs::exists(src) && fs::exists(tgt)) {
      try {
        read_manifest(src);
        read_manifest(tgt);
        mark("synth", false);
        return;
      } catch (const Error&) {
        log("synth: existing manifests unreadable, regenerating");
      }
    }
    testkit::generate_benchmark(spec);
    write_file_atomic(paths_.synth_stamp(), key + "\n");
    loaded_.reset();
    mark("synth", true);
  });
}

void Pipeline::extract() {
  acquire_lock();
  in_stage("extract", [&] {
    for (Domain d : {Domain::source, Domain::target}) {
      const fs::path mpath = d == Domain::source ? cfg_.paths.source_manifest : cfg_.paths.target_manifest;
      if (!fs::exists(mpath)) {
        throw Error("missing " + std::string(to_string(d)) + " manifest " + mpath.string());
      }
      const Manifest m = read_manifest(mpath);
      if (m.domain != d) {
        throw ValidationError("manifest " + mpath.string() + " is a " + std::string(to_string(m.domain)) +
                              " manifest, expected " + std::string(to_string(d)));
      }
      const fs::path base = mpath.parent_path();
      const fs::path cache = paths_.style_cache(d);

      // Keyed on the image bytes, not on tags or timestamps.
      Sha256 h;
      h.update(std::string_view("extract v1\n"));
      h.update(to_hex(extractor_fingerprint(cfg_.extractor)) + "\n");
      for (const auto& r : m.records) {
        h.update(r.id + "\t" + r.path + "\t" + file_hash(base / r.path) + "\n");
      }
      const std::string key = to_hex(h.finish());
      const std::string stored = read_key(key_path(cache));

      if (fs::exists(cache) && stored != key) {
        const StyleCacheHeader header = read_style_cache_header(cache);
        if (header.fingerprint == extractor_fingerprint(cfg_.extractor)) {
          // Same extractor, changed images: the cache is stale.
          fs::remove(cache);
        }
      }
      const ExtractionOutcome out = extract_dataset(m, base, cfg_.extractor, cache, cfg_.threads);
      if (stored != key) write_file_atomic(key_path(cache), key + "\n");
      counters_.extractions += out.extracted;
      mark("extract:" + std::string(to_string(d)), !out.cache_hit);
    }
    loaded_.reset();
  });
}

const Pipeline::Loaded& Pipeline::loaded() {
  if (loaded_) return *loaded_;
  auto l = std::make_unique<Loaded>();
  std::string cache_hashes;
  for (Domain d : {Domain::source, Domain::target}) {
    const int i = d == Domain::source ? 0 : 1;
    const fs::path mpath = d == Domain::source ? cfg_.paths.source_manifest : cfg_.paths.target_manifest;
    l->manifest[i] = read_manifest(mpath);
    l->base_dir[i] = mpath.parent_path();
    const fs::path cache = paths_.style_cache(d);
    if (!fs::exists(cache)) {
      throw Error("missing style cache for domain " + std::string(to_string(d)) + " (run extract first)");
    }
    l->vectors[i] = read_style_cache(cache);
    if (l->vectors[i].fingerprint != extractor_fingerprint(cfg_.extractor)) {
      throw FingerprintMismatch("style cache " + cache.string() +
                                " does not match the configured extractor (run extract)");
    }
    std::vector<std::string> ids;
    for (const auto& r : l->manifest[i].records) ids.push_back(r.id);
    if (ids != l->vectors[i].ids) {
      throw ValidationError("style cache " + cache.string() + " is stale for its manifest (run extract)");
    }
    cache_hashes += file_hash(cache) + "\n";
  }
  if (cfg_.clustering.standardize) {
    // One fit over both domains so they share the standardized space.
    const Standardizer s = Standardizer::fit(Matrix::stack(l->vectors[0].values, l->vectors[1].values));
    l->points[0] = s.transform(l->vectors[0].values);
    l->points[1] = s.transform(l->vectors[1].values);
  } else {
    l->points[0] = l->vectors[0].values;
    l->points[1] = l->vectors[1].values;
  }
  l->space_key = make_key({"space v1", cache_hashes, cfg_.clustering.standardize ? "standardized" : "raw"});
  loaded_ = std::move(l);
  return *loaded_;
}

KDiagnostics Pipeline::diagnose_k(Domain d) {
  acquire_lock();
  const std::string stage = "diagnose-k:" + std::string(to_string(d));
  return in_stage("diagnose-k", [&] {
    const Loaded& l = loaded();
    const Matrix& pts = l.points[d == Domain::source ? 0 : 1];
    std::vector<int> ks;
    for (int k : cfg_.clustering.candidate_ks) {
      if (static_cast<std::size_t>(k) < pts.rows()) ks.push_back(k);
    }
    if (ks.empty()) throw ValidationError("no candidate k below the instance count " + std::to_string(pts.rows()));
    const std::uint64_t seed = derive_seed(cfg_.seed, "diagnose-k:" + std::string(to_string(d)));
    const std::string key = make_key({"diagnose-k v1", l.space_key, std::string(to_string(d)), format_int_list(ks),
                                      std::to_string(seed), std::to_string(cfg_.clustering.restarts)});
    const fs::path table = paths_.diagnostics_table(d);
    const fs::path summary = paths_.diagnostics_summary(d);
    if (read_key(key_path(table)) == key && fs::exists(table) && fs::exists(summary)) {
      try {
        KDiagnostics cached = read_diagnostics(table, summary);
        mark(stage, false);
        return cached;
      } catch (const std::exception&) {
        log(stage + ": unreadable diagnostics, recomputing");
      }
    }
    KDiagnostics diag = stylefilter::diagnose_k(pts, ks, seed, cfg_.clustering.restarts);
    write_diagnostics(diag, table, summary);
    write_file_atomic(key_path(table), key + "\n");
    ++counters_.clusterings;
    mark(stage, true);
    return diag;
  });
}

void Pipeline::cluster(Domain d) {
  acquire_lock();
  const std::string stage = "cluster:" + std::string(to_string(d));
  in_stage("cluster", [&] {
    const Loaded& l = loaded();
    const int i = d == Domain::source ? 0 : 1;
    const int k = d == Domain::source ? cfg_.clustering.k_source : cfg_.clustering.k_target;
    KMeansOptions opts;
    opts.k = k;
    opts.seed = derive_seed(cfg_.seed, "cluster:" + std::string(to_string(d)));
    opts.restarts = cfg_.clustering.restarts;
    opts.max_iter = cfg_.clustering.max_iter;
    opts.tol = cfg_.clustering.tol;
    const std::string key =
        make_key({"cluster v1", l.space_key, std::string(to_string(d)), std::to_string(k), std::to_string(opts.seed),
                  std::to_string(opts.restarts), std::to_string(opts.max_iter), num(opts.tol)});
    const fs::path out = paths_.clustering(d);
    if (fs::exists(out)) {
      try {
        if (read_clustering(out).input_key == key) {
          mark(stage, false);
          return;
        }
      } catch (const Error&) {
        log(stage + ": unreadable clustering file, recomputing");
      }
    }
    ClusteringArtifact a;
    a.domain = d;
    a.result = kmeans(l.points[i], opts);
    a.ids = l.vectors[i].ids;
    a.silhouette = k >= 2 && static_cast<std::size_t>(k) < l.points[i].rows()
                       ? silhouette(l.points[i], a.result.assignments).mean
                       : std::nan("");
    a.standardized = cfg_.clustering.standardize;
    a.input_key = key;
    write_clustering(a, out);
    ++counters_.clusterings;
    mark(stage, true);
  });
}

RunReport Pipeline::filter() {
  acquire_lock();
  return in_stage("filter", [&] {
    ClusteringArtifact art[2];
    for (Domain d : {Domain::source, Domain::target}) {
      const fs::path p = paths_.clustering(d);
      if (!fs::exists(p)) throw Error("missing clustering artifact for domain " + std::string(to_string(d)));
      art[d == Domain::source ? 0 : 1] = read_clustering(p);
    }
    const Loaded& l = loaded();
    for (int i = 0; i < 2; ++i) {
      if (art[i].ids != l.vectors[i].ids || art[i].standardized != cfg_.clustering.standardize) {
        throw Error("clustering artifact for domain " + std::string(to_string(art[i].domain)) +
                    " is stale (run cluster)");
      }
    }

    const std::uint64_t seed = derive_seed(cfg_.seed, "centroids");
    const std::string key = make_key(
        {"filter v1", l.space_key, art[0].input_key, art[1].input_key, file_hash(paths_.clustering(Domain::source)),
         file_hash(paths_.clustering(Domain::target)), l.manifest[0].checksum, std::to_string(seed),
         std::to_string(cfg_.clustering.restarts), format_int_list(cfg_.filter.centroid_candidate_ks),
         std::string(to_string(cfg_.filter.mode)),
         cfg_.filter.single_k ? std::to_string(*cfg_.filter.single_k) : "-", cfg_.filter.weighted ? "w" : "u"});

    const CentroidSet cs = CentroidSet::from(compute_centroids(art[0].result, l.points[0], Domain::source),
                                             compute_centroids(art[1].result, l.points[1], Domain::target));

    FilterReport fr;
    bool reused = false;
    if (fs::exists(paths_.filter_state()) && fs::exists(paths_.filtered_manifest())) {
      try {
        const json state = json::parse(read_text_file(paths_.filter_state()));
        if (state.at("input_key").get<std::string>() == key) {
          fr = filter_state_from_json(state);
          read_manifest(paths_.filtered_manifest());
          reused = true;
        }
      } catch (const std::exception&) {
        log("filter: unreadable filter state, recomputing");
      }
    }

    if (!reused) {
      CentroidClusteringOptions co;
      co.seed = seed;
      co.restarts = cfg_.clustering.restarts;
      co.weighted = cfg_.filter.weighted;
      fr.candidates_auto = cfg_.filter.centroid_candidate_ks.empty();
      fr.candidate_ks = fr.candidates_auto ? auto_centroid_candidates(cs, co) : cfg_.filter.centroid_candidate_ks;
      const CentroidClustering cc = cluster_centroids(cs, fr.candidate_ks, co);
      for (const auto& g : cc.per_k) {
        fr.groupings[g.k] = g.grouping;
        fr.isolated_per_k[g.k] = isolated_source_labels(g.grouping, cs);
      }
      fr.mode = cfg_.filter.mode;
      fr.weighted = cfg_.filter.weighted;
      fr.removed_source_clusters = decide_removal(fr.isolated_per_k, fr.mode, cfg_.filter.single_k);
      const FilterOutcome fo = apply_filter(l.manifest[0], art[0].ids, art[0].result.assignments,
                                            fr.removed_source_clusters);
      fr.kept = fo.kept;
      fr.removed = fo.removed;

      // The filtered manifest's paths must stay valid from the output directory.
      Manifest filtered = fo.filtered;
      const fs::path out_dir = fs::absolute(paths_.root).lexically_normal();
      const fs::path src_dir = fs::absolute(l.base_dir[0]).lexically_normal();
      if (out_dir != src_dir) {
        for (auto& r : filtered.records) r.path = (src_dir / r.path).lexically_relative(out_dir).generic_string();
        filtered = make_manifest(Domain::source, std::move(filtered.records), filtered.created_at);
      }
      write_file_atomic(paths_.centroids(), format_centroids(cs));
      write_manifest(filtered, paths_.filtered_manifest());
      write_file_atomic(paths_.filter_state(), filter_state_json(fr, key).dump(2) + "\n");
      ++counters_.clusterings;
    }
    mark("filter", !reused);
    fr.output_manifest_path = paths_.filtered_manifest().string();

    RunReport r;
    r.tool_version = tool_version();
    r.extractor_fingerprint = to_hex(l.vectors[0].fingerprint);
    r.standardized = cfg_.clustering.standardize;
    DomainSummary* sums[2] = {&r.source, &r.target};
    for (int i = 0; i < 2; ++i) {
      sums[i]->k = art[i].result.k;
      sums[i]->seed = art[i].result.seed;
      sums[i]->restarts = art[i].result.restarts;
      sums[i]->instances = art[i].ids.size();
      sums[i]->sse = art[i].result.sse;
      sums[i]->silhouette = art[i].silhouette;
    }
    r.filter = fr;

    // Tag echo, informational only.
    std::map<std::string, int> cluster_of;
    for (std::size_t i = 0; i < art[0].ids.size(); ++i) cluster_of[art[0].ids[i]] = art[0].result.assignments[i];
    for (const auto& rec : l.manifest[0].records) {
      const bool removed = fr.removed_source_clusters.count(cluster_of.at(rec.id)) > 0;
      for (const auto& tag : rec.class_tags) {
        auto& c = r.tag_echo[tag];
        (removed ? c.removed : c.kept)++;
      }
    }
    r.resolved_config = format_config(cfg_);
    r.warnings = cfg_.warnings();
    r.counters = counters_;
    write_report(r, paths_.report());
    return r;
  });
}

void Pipeline::project(ProjectionSubject subject) {
  acquire_lock();
  const std::string name(subject_name(subject));
  in_stage("project", [&] {
    const Loaded& l = loaded();
    ClusteringArtifact art[2];
    for (Domain d : {Domain::source, Domain::target}) {
      const int i = d == Domain::source ? 0 : 1;
      if (subject == ProjectionSubject::centroids || static_cast<int>(subject) == i) {
        const fs::path p = paths_.clustering(d);
        if (!fs::exists(p)) throw Error("missing clustering artifact for domain " + std::string(to_string(d)));
        art[i] = read_clustering(p);
        if (art[i].ids != l.vectors[i].ids) {
          throw Error("clustering artifact for domain " + std::string(to_string(d)) + " is stale (run cluster)");
        }
      }
    }

    Matrix pts;
    std::vector<std::string> ids;
    std::vector<int> labels;
    std::vector<std::string> domains;
    std::string input;
    if (subject == ProjectionSubject::centroids) {
      const CentroidSet cs = CentroidSet::from(compute_centroids(art[0].result, l.points[0], Domain::source),
                                               compute_centroids(art[1].result, l.points[1], Domain::target));
      pts = cs.vectors;
      for (int lab : cs.labels()) {
        ids.push_back("c" + std::to_string(lab));
        labels.push_back(lab);
        domains.emplace_back(to_string(cs.domain_of(lab)));
      }
      input = art[0].input_key + art[1].input_key;
    } else {
      const int i = static_cast<int>(subject);
      const std::size_t n = l.points[i].rows();
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      if (n > cfg_.projection.subsample_cap) {
        // Seeded partial Fisher-Yates, then back to manifest order.
        Rng rng(derive_seed(cfg_.seed, "subsample:" + name));
        for (std::size_t j = 0; j < cfg_.projection.subsample_cap; ++j) {
          std::swap(idx[j], idx[j + static_cast<std::size_t>(rng.below(n - j))]);
        }
        idx.resize(cfg_.projection.subsample_cap);
        std::sort(idx.begin(), idx.end());
      }
      pts = l.points[i].select_rows(idx);
      for (std::size_t j : idx) {
        ids.push_back(art[i].ids[j]);
        labels.push_back(art[i].result.assignments[j]);
        domains.push_back(name);
      }
      input = art[i].input_key;
    }

    for (ProjectionMethod m : cfg_.projection.methods) {
      const std::string stage = "project:" + name + ":" + std::string(to_string(m));
      const fs::path tsv = paths_.projection(name, m, "tsv");
      const fs::path svg = paths_.projection(name, m, "svg");
      TsneParams tp;
      tp.iterations = cfg_.projection.tsne_iterations;
      tp.seed = derive_seed(cfg_.seed, "tsne:" + name);
      const double n = static_cast<double>(pts.rows());
      // Small sets (centroids) cannot support the configured perplexity.
      tp.perplexity = std::min(cfg_.projection.tsne_perplexity, 0.9 * (n - 1.0) / 3.0);
      const std::string key =
          make_key({"project v1", l.space_key, input, std::string(to_string(m)), std::to_string(pts.rows()),
                    num(tp.perplexity), std::to_string(tp.iterations), std::to_string(tp.seed)});
      if (read_key(key_path(tsv)) == key && fs::exists(tsv) && fs::exists(svg)) {
        mark(stage, false);
        continue;
      }
      if ((m == ProjectionMethod::pca && pts.rows() < 3) || (m == ProjectionMethod::tsne && pts.rows() < 4)) {
        log(stage + ": too few points (" + std::to_string(pts.rows()) + "), not projected");
        mark(stage, false);
        continue;
      }
      Projection2D p = m == ProjectionMethod::pca ? pca_project(pts, 2) : tsne_project(pts, tp);
      p.point_ids = ids;
      p.cluster_labels = labels;
      p.domains = domains;
      export_projection(p, tsv);
      export_projection_svg(p, svg);
      write_file_atomic(key_path(tsv), key + "\n");
      mark(stage, true);
    }
  });
}

RunReport Pipeline::run() {
  acquire_lock();
  if (cfg_.paths.synth_spec) synth();
  extract();
  for (Domain d : {Domain::source, Domain::target}) {
    const KDiagnostics diag = diagnose_k(d);
    const int chosen = d == Domain::source ? cfg_.clustering.k_source : cfg_.clustering.k_target;
    log("diagnose-k:" + std::string(to_string(d)) + ": silhouette suggests k=" +
        std::to_string(diag.suggested_k_silhouette) +
        (diag.suggested_k_elbow ? ", elbow suggests k=" + std::to_string(*diag.suggested_k_elbow) : std::string()) +
        "; configured k=" + std::to_string(chosen));
  }
  cluster(Domain::source);
  cluster(Domain::target);
  RunReport report = filter();
  if (cfg_.projection.enable) {
    for (auto s : {ProjectionSubject::source, ProjectionSubject::target, ProjectionSubject::centroids}) project(s);
  }
  // Rewritten so the counters cover the whole run.
  report.counters = counters_;
  in_stage("report", [&] { write_report(report, paths_.report()); });
  return report;
}

}  // namespace stylefilter
