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

#include "stylefilter/report.hpp"

#include <cmath>

#include "json.hpp"
#include "stylefilter/fileio.hpp"

#ifndef STYLEFILTER_VERSION
#define STYLEFILTER_VERSION "0.0.0"
#endif

namespace stylefilter {

namespace {

using json = nlohmann::ordered_json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json domain_json(const DomainSummary& d) {
  json j;
  j["k"] = d.k;
  j["seed"] = d.seed;
  j["restarts"] = d.restarts;
  j["instances"] = d.instances;
  j["sse"] = number_or_null(d.sse);
  j["silhouette"] = number_or_null(d.silhouette);
  return j;
}

json filter_json(const FilterReport& f) {
  json j;
  j["mode"] = std::string(to_string(f.mode));
  j["candidate_ks"] = f.candidate_ks;
  j["candidates_auto"] = f.candidates_auto;
  // Flags the formalization of "consistently isolated" used by the decision.
  j["decision_rule"] = f.mode == RemovalMode::all_k   ? "intersection of isolated sets over candidate ks"
                       : f.mode == RemovalMode::any_k ? "union of isolated sets over candidate ks"
                                                      : "isolated set of one candidate k";
  j["weighted"] = f.weighted;
  json groupings = json::object();
  for (const auto& [k, g] : f.groupings) groupings[std::to_string(k)] = g;
  j["groupings"] = groupings;
  json isolated = json::object();
  for (const auto& [k, s] : f.isolated_per_k) isolated[std::to_string(k)] = std::vector<int>(s.begin(), s.end());
  j["isolated_per_k"] = isolated;
  j["removed_source_clusters"] = std::vector<int>(f.removed_source_clusters.begin(), f.removed_source_clusters.end());
  j["kept"] = f.kept;
  j["removed"] = f.removed;
  j["output_manifest"] = f.output_manifest_path;
  return j;
}

}  // namespace

std::string tool_version() { return STYLEFILTER_VERSION; }

std::string format_report_json(const RunReport& r) {
  json j;
  j["tool_version"] = r.tool_version;
  j["extractor_fingerprint"] = r.extractor_fingerprint;
  j["standardized"] = r.standardized;
  j["source"] = domain_json(r.source);
  j["target"] = domain_json(r.target);
  j["filter"] = filter_json(r.filter);
  json tags = json::object();
  for (const auto& [tag, c] : r.tag_echo) tags[tag] = {{"kept", c.kept}, {"removed", c.removed}};
  j["tag_echo"] = tags;
  j["counters"] = {{"extractions", r.counters.extractions},
                   {"clusterings", r.counters.clusterings},
                   {"stages_run", r.counters.stages_run},
                   {"stages_skipped", r.counters.stages_skipped}};
  j["warnings"] = r.warnings;
  j["config"] = r.resolved_config;
  return j.dump(2) + "\n";
}

void write_report(const RunReport& r, const std::filesystem::path& path) {
  write_file_atomic(path, format_report_json(r));
}

}  // namespace stylefilter
