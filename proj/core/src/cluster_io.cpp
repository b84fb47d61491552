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

#include "stylefilter/cluster_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>
#include <sstream>

#include <fmt/format.h>

#include "stylefilter/error.hpp"
#include "stylefilter/fileio.hpp"

namespace stylefilter {

namespace {

constexpr std::string_view kMagic = "SFCLUST v1";

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);  // shortest round-trip form
}

double parse_num(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw CorruptError("clustering file: bad number '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') throw CorruptError("clustering file: bad integer '" + s + "'");
  return v;
}

}  // namespace

std::string format_clustering(const ClusteringArtifact& a) {
  const ClusteringResult& r = a.result;
  if (r.assignments.size() != a.ids.size()) throw ValidationError("clustering: ids and assignments disagree");
  std::string out(kMagic);
  out += "\ndomain " + std::string(to_string(a.domain));
  out += "\nk " + std::to_string(r.k);
  out += "\nseed " + std::to_string(r.seed);
  out += "\nrestarts " + std::to_string(r.restarts);
  out += "\niterations " + std::to_string(r.iterations_run);
  out += "\nbest_restart " + std::to_string(r.best_restart);
  out += "\nsse " + num(r.sse);
  out += "\nsilhouette " + num(a.silhouette);
  out += "\nstandardized " + std::string(a.standardized ? "1" : "0");
  out += "\ninput_key " + (a.input_key.empty() ? std::string("-") : a.input_key);
  out += "\ndim " + std::to_string(r.centroids.cols());
  for (std::size_t c = 0; c < r.centroids.rows(); ++c) {
    out += "\ncentroid " + std::to_string(c);
    for (double v : r.centroids.row(c)) out += " " + num(v);
  }
  out += "\nassignments " + std::to_string(r.assignments.size());
  for (std::size_t i = 0; i < a.ids.size(); ++i) {
    out += "\n" + a.ids[i] + " " + std::to_string(r.assignments[i]);
  }
  out += "\n";
  return out;
}

ClusteringArtifact parse_clustering(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw CorruptError("clustering file: missing SFCLUST v1 header");
  ClusteringArtifact a;
  ClusteringResult& r = a.result;
  auto expect = [&](const std::string& key) {
    std::string k, v;
    if (!(in >> k) || k != key || !(in >> v)) throw CorruptError("clustering file: expected '" + key + "'");
    return v;
  };
  a.domain = parse_domain(expect("domain"));
  r.k = static_cast<int>(parse_int(expect("k")));
  r.seed = std::stoull(expect("seed"));
  r.restarts = static_cast<int>(parse_int(expect("restarts")));
  r.iterations_run = static_cast<int>(parse_int(expect("iterations")));
  r.best_restart = static_cast<int>(parse_int(expect("best_restart")));
  r.sse = parse_num(expect("sse"));
  a.silhouette = parse_num(expect("silhouette"));
  a.standardized = expect("standardized") == "1";
  a.input_key = expect("input_key");
  if (a.input_key == "-") a.input_key.clear();
  const auto dim = static_cast<std::size_t>(parse_int(expect("dim")));
  if (r.k < 1) throw CorruptError("clustering file: k must be >= 1");
  r.centroids = Matrix(static_cast<std::size_t>(r.k), dim);
  for (int c = 0; c < r.k; ++c) {
    if (parse_int(expect("centroid")) != c) throw CorruptError("clustering file: centroid rows out of order");
    for (std::size_t j = 0; j < dim; ++j) {
      std::string v;
      if (!(in >> v)) throw CorruptError("clustering file: truncated centroid");
      r.centroids(static_cast<std::size_t>(c), j) = parse_num(v);
    }
  }
  const auto n = static_cast<std::size_t>(parse_int(expect("assignments")));
  for (std::size_t i = 0; i < n; ++i) {
    std::string id, c;
    if (!(in >> id >> c)) throw CorruptError("clustering file: truncated assignments");
    const auto cluster = parse_int(c);
    if (cluster < 0 || cluster >= r.k) throw CorruptError("clustering file: assignment out of range");
    a.ids.push_back(id);
    r.assignments.push_back(static_cast<int>(cluster));
  }
  std::string extra;
  if (in >> extra) throw CorruptError("clustering file: trailing content");
  return a;
}

void write_clustering(const ClusteringArtifact& a, const std::filesystem::path& path) {
  write_file_atomic(path, format_clustering(a));
}

ClusteringArtifact read_clustering(const std::filesystem::path& path) {
  return parse_clustering(read_text_file(path));
}

std::string format_diagnostics_table(const KDiagnostics& d) {
  std::string out = "k\tsse\tsilhouette\n";
  for (std::size_t i = 0; i < d.candidate_ks.size(); ++i) {
    out += std::to_string(d.candidate_ks[i]) + "\t" + num(d.sse_curve[i]) + "\t" +
           num(d.silhouette_curve[i]) + "\n";
  }
  return out;
}

void write_diagnostics(const KDiagnostics& d, const std::filesystem::path& table_path,
                       const std::filesystem::path& summary_path) {
  write_file_atomic(table_path, format_diagnostics_table(d));
  nlohmann::ordered_json j;
  j["candidate_ks"] = d.candidate_ks;
  j["suggested_k_silhouette"] = d.suggested_k_silhouette;
  if (d.suggested_k_elbow) {
    j["suggested_k_elbow"] = *d.suggested_k_elbow;
  } else {
    j["suggested_k_elbow"] = nullptr;
    j["elbow_note"] = "absent: fewer than 3 candidate k values";
  }
  write_file_atomic(summary_path, j.dump(2) + "\n");
}

}  // namespace stylefilter
