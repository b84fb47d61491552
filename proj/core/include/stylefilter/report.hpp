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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stylefilter/filter.hpp"

namespace stylefilter {

struct DomainSummary {
  int k = 0;
  std::uint64_t seed = 0;
  int restarts = 0;
  std::size_t instances = 0;
  double sse = 0.0;
  double silhouette = 0.0;
};

struct RunCounters {
  std::size_t extractions = 0;  // images run through the extractor
  std::size_t clusterings = 0;  // k-means stages executed (domain, diagnostics, centroids)
  std::vector<std::string> stages_run;
  std::vector<std::string> stages_skipped;
};

struct TagCount {
  std::size_t kept = 0;
  std::size_t removed = 0;
};

struct RunReport {
  std::string tool_version;
  std::string extractor_fingerprint;
  bool standardized = true;
  DomainSummary source;
  DomainSummary target;
  FilterReport filter;
  // Informational echo of class tags over kept/removed records; never
  // consulted by the filter.
  std::map<std::string, TagCount> tag_echo;
  std::string resolved_config;
  RunCounters counters;
  std::vector<std::string> warnings;
};

std::string tool_version();

// report.json content; keys are emitted in a fixed order.
std::string format_report_json(const RunReport& r);
void write_report(const RunReport& r, const std::filesystem::path& path);

}  // namespace stylefilter
