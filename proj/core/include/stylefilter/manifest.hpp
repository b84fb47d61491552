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
#include <string_view>
#include <vector>

namespace stylefilter {

enum class Domain { source, target };

std::string_view to_string(Domain d);
// Throws ValidationError for anything but "source" / "target".
Domain parse_domain(std::string_view text);
// "src" / "tgt", used as the id prefix.
std::string_view id_prefix(Domain d);

struct ImageRecord {
  std::string id;
  std::string path;  // relative to the manifest's directory
  Domain domain = Domain::source;
  std::vector<std::string> class_tags;
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct Manifest {
  Domain domain = Domain::source;
  std::vector<ImageRecord> records;
  std::string created_at;  // ISO-8601 UTC; not covered by the checksum
  std::string checksum;    // hex SHA-256 of the serialized record lines

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

struct Rejection {
  std::string path;
  std::string reason;
};

struct BuildResult {
  Manifest manifest;
  std::vector<Rejection> rejected;
};

std::string utc_timestamp_now();

// Record ids of the form "src-000042": zero-padded ordinal, domain prefix.
std::string make_record_id(Domain d, std::size_t ordinal);

// Serialized record lines (one per record, '\n'-terminated), the checksum's
// input.
std::string serialize_records(const std::vector<ImageRecord>& records);
std::string compute_checksum(const std::vector<ImageRecord>& records);

// Fills domain on every record, recomputes the checksum and validates.
Manifest make_manifest(Domain domain, std::vector<ImageRecord> records,
                       std::string created_at = utc_timestamp_now());

// Throws ValidationError on duplicate ids, empty paths, bad sizes, mixed
// domains or a stale checksum.
void validate_manifest(const Manifest& m);

// Enumerates files under root_dir whose root-relative path matches `glob`
// (fnmatch syntax), in lexicographic path order. Undecodable files are
// reported in BuildResult::rejected. Throws ValidationError("no images found")
// when nothing decodable matches and IoError when root_dir is unreadable.
BuildResult build_manifest(const std::filesystem::path& root_dir, Domain domain,
                           std::string_view glob);

std::string format_manifest(const Manifest& m);
Manifest parse_manifest(std::string_view text);

void write_manifest(const Manifest& m, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

}  // namespace stylefilter
