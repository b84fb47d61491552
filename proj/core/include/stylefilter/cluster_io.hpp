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

#include <filesystem>
#include <string>
#include <vector>

#include "stylefilter/clustering.hpp"
#include "stylefilter/manifest.hpp"

namespace stylefilter {

/// Persisted form of one domain's clustering ("SFCLUST v1" text file).
struct ClusteringArtifact {
  Domain domain = Domain::source;
  ClusteringResult result;
  std::vector<std::string> ids;  // aligned with result.assignments
  double silhouette = 0.0;       // NaN when undefined (k = 1)
  bool standardized = true;
  std::string input_key;         // hex digest of everything the result depends on
};

std::string format_clustering(const ClusteringArtifact& a);
ClusteringArtifact parse_clustering(std::string_view text);
void write_clustering(const ClusteringArtifact& a, const std::filesystem::path& path);
ClusteringArtifact read_clustering(const std::filesystem::path& path);

// Tab-separated "k  sse  silhouette" table with a header row.
std::string format_diagnostics_table(const KDiagnostics& d);
void write_diagnostics(const KDiagnostics& d, const std::filesystem::path& table_path,
                       const std::filesystem::path& summary_path);

}  // namespace stylefilter
