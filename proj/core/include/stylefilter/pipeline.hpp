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
#include <memory>
#include <optional>
#include <string>

#include "stylefilter/clustering.hpp"
#include "stylefilter/config.hpp"
#include "stylefilter/fileio.hpp"
#include "stylefilter/report.hpp"

namespace stylefilter {

/// Artifact locations inside the output directory.
struct ArtifactPaths {
  std::filesystem::path root;

  std::filesystem::path style_cache(Domain d) const;
  std::filesystem::path diagnostics_table(Domain d) const;
  std::filesystem::path diagnostics_summary(Domain d) const;
  std::filesystem::path clustering(Domain d) const;
  std::filesystem::path centroids() const;
  std::filesystem::path filter_state() const;
  std::filesystem::path filtered_manifest() const;
  std::filesystem::path report() const;
  std::filesystem::path synth_stamp() const;
  std::filesystem::path projection(const std::string& subject, ProjectionMethod m,
                                   const std::string& ext) const;
};

enum class ProjectionSubject { source, target, centroids };
ProjectionSubject parse_projection_subject(std::string_view text);

/// The six-stage curation pipeline. Each stage persists its artifact
/// atomically and is skipped when the content hash of its inputs matches the
/// one recorded in the existing artifact. Failures surface as StageError.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg);
  ~Pipeline();
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  const PipelineConfig& config() const noexcept { return cfg_; }
  const ArtifactPaths& paths() const noexcept { return paths_; }
  const RunCounters& counters() const noexcept { return counters_; }

  void synth();
  void extract();
  KDiagnostics diagnose_k(Domain d);
  void cluster(Domain d);
  // Writes the filtered manifest and report.json.
  RunReport filter();
  void project(ProjectionSubject subject);
  // synth (when configured), extract, diagnose-k, cluster, filter, project.
  RunReport run();

 private:
  struct Loaded;

  void log(const std::string& message) const;
  void acquire_lock();
  const Loaded& loaded();
  void mark(const std::string& stage, bool ran);

  PipelineConfig cfg_;
  ArtifactPaths paths_;
  RunCounters counters_;
  std::unique_ptr<Loaded> loaded_;
  std::unique_ptr<DirectoryLock> lock_;
};

}  // namespace stylefilter
