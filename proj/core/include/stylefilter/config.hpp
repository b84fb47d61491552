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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stylefilter/extractor.hpp"
#include "stylefilter/filter.hpp"
#include "stylefilter/projection.hpp"

namespace stylefilter {

/// One "key = value" line of a sectioned configuration text.
struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

// '#' starts a comment; "[name]" opens a section; keys outside a section are
// rejected. Throws ConfigError with the line number.
std::vector<ConfigEntry> parse_sectioned(std::string_view text);

struct PathsConfig {
  std::filesystem::path source_manifest;
  std::filesystem::path target_manifest;
  std::filesystem::path output_dir = "stylefilter-out";
  std::optional<std::filesystem::path> synth_spec;
};

struct ClusteringConfig {
  int k_source = 7;
  int k_target = 3;
  int restarts = 10;
  int max_iter = 300;
  double tol = 1e-8;
  bool standardize = true;
  std::vector<int> candidate_ks{2, 3, 4, 5, 6, 7, 8, 9, 10};
};

struct FilterConfig {
  std::vector<int> centroid_candidate_ks;  // empty = top-2 by silhouette
  RemovalMode mode = RemovalMode::all_k;
  std::optional<int> single_k;
  bool weighted = false;
};

struct ProjectionConfig {
  bool enable = true;
  std::vector<ProjectionMethod> methods{ProjectionMethod::pca, ProjectionMethod::tsne};
  double tsne_perplexity = 30.0;
  int tsne_iterations = 1000;
  std::size_t subsample_cap = 5000;
};

struct PipelineConfig {
  PathsConfig paths;
  ExtractorConfig extractor = ExtractorConfig::filterbank_defaults();
  ClusteringConfig clustering;
  FilterConfig filter;
  ProjectionConfig projection;
  std::uint64_t seed = 42;
  int threads = 1;
  bool verbose = false;

  // Warnings that do not stop a run (e.g. k_source < k_target).
  std::vector<std::string> warnings() const;
  // Throws ConfigError.
  void validate() const;
};

// Unknown sections or keys and malformed values throw ConfigError. Relative
// paths are resolved against base_dir.
PipelineConfig parse_config(std::string_view text,
                            const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

// Fully resolved configuration with every key spelled out; parses back to an
// equivalent config.
std::string format_config(const PipelineConfig& cfg);

std::vector<int> parse_int_list(std::string_view text);
std::string format_int_list(const std::vector<int>& values);

}  // namespace stylefilter
