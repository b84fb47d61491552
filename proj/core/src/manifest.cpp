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

#include "stylefilter/manifest.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <set>
#include <sstream>

#include "stylefilter/error.hpp"
#include "stylefilter/fileio.hpp"
#include "stylefilter/hash.hpp"
#include "stylefilter/image.hpp"

namespace fs = std::filesystem;

namespace stylefilter {

namespace {

constexpr std::string_view kMagic = "SFMANIFEST v1";

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

int parse_dimension(std::string_view s, int line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("manifest line " + std::to_string(line) + ": bad size field '" +
                          std::string(s) + "'");
  }
  return v;
}

bool has_control(std::string_view s) {
  return s.find_first_of("\t\n\r") != std::string_view::npos;
}

}  // namespace

std::string_view to_string(Domain d) { return d == Domain::source ? "source" : "target"; }

Domain parse_domain(std::string_view text) {
  if (text == "source") return Domain::source;
  if (text == "target") return Domain::target;
  throw ValidationError("unknown domain '" + std::string(text) + "'");
}

std::string_view id_prefix(Domain d) { return d == Domain::source ? "src" : "tgt"; }

std::string utc_timestamp_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string make_record_id(Domain d, std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%06zu", std::string(id_prefix(d)).c_str(), ordinal);
  return buf;
}

std::string serialize_records(const std::vector<ImageRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.id;
    out += '\t';
    out += r.path;
    out += '\t';
    out += std::to_string(r.width);
    out += '\t';
    out += std::to_string(r.height);
    out += '\t';
    for (std::size_t i = 0; i < r.class_tags.size(); ++i) {
      if (i) out += ',';
      out += r.class_tags[i];
    }
    out += '\n';
  }
  return out;
}

std::string compute_checksum(const std::vector<ImageRecord>& records) {
  return to_hex(sha256(serialize_records(records)));
}

void validate_manifest(const Manifest& m) {
  std::set<std::string_view> ids;
  for (const auto& r : m.records) {
    if (r.id.empty() || has_control(r.id)) throw ValidationError("invalid record id '" + r.id + "'");
    if (!ids.insert(r.id).second) throw ValidationError("duplicate id " + r.id);
    if (r.path.empty()) throw ValidationError("record " + r.id + " has an empty path");
    if (has_control(r.path)) throw ValidationError("record " + r.id + " path contains control characters");
    if (r.width < 1 || r.height < 1) throw ValidationError("record " + r.id + " has no image size");
    if (r.domain != m.domain) throw ValidationError("record " + r.id + " domain differs from manifest");
    for (const auto& t : r.class_tags) {
      if (t.empty() || has_control(t) || t.find(',') != std::string::npos) {
        throw ValidationError("record " + r.id + " has an invalid class tag '" + t + "'");
      }
    }
  }
  if (m.checksum != compute_checksum(m.records)) throw CorruptError("manifest corrupted");
}

Manifest make_manifest(Domain domain, std::vector<ImageRecord> records, std::string created_at) {
  for (auto& r : records) r.domain = domain;
  Manifest m;
  m.domain = domain;
  m.records = std::move(records);
  m.created_at = std::move(created_at);
  m.checksum = compute_checksum(m.records);
  validate_manifest(m);
  return m;
}

BuildResult build_manifest(const fs::path& root_dir, Domain domain, std::string_view glob) {
  std::error_code ec;
  if (!fs::is_directory(root_dir, ec)) {
    throw IoError("cannot read directory " + root_dir.string());
  }
  std::vector<std::string> matches;
  const std::string pattern(glob);
  fs::recursive_directory_iterator it(root_dir, ec), end;
  if (ec) throw IoError("cannot read directory " + root_dir.string() + ": " + ec.message());
  for (; it != end; it.increment(ec)) {
    if (ec) throw IoError("cannot read directory " + root_dir.string() + ": " + ec.message());
    if (!it->is_regular_file(ec)) continue;
    const std::string rel = fs::relative(it->path(), root_dir).generic_string();
    if (::fnmatch(pattern.c_str(), rel.c_str(), 0) == 0) matches.push_back(rel);
  }
  std::sort(matches.begin(), matches.end());

  BuildResult out;
  std::vector<ImageRecord> records;
  for (const auto& rel : matches) {
    try {
      const Image img = read_png(root_dir / rel);
      ImageRecord r;
      r.id = make_record_id(domain, records.size());
      r.path = rel;
      r.domain = domain;
      r.width = img.width;
      r.height = img.height;
      records.push_back(std::move(r));
    } catch (const IoError& e) {
      out.rejected.push_back({rel, e.what()});
    }
  }
  if (records.empty()) throw ValidationError("no images found");
  out.manifest = make_manifest(domain, std::move(records));
  return out;
}

std::string format_manifest(const Manifest& m) {
  validate_manifest(m);
  std::string out(kMagic);
  out += " domain=";
  out += to_string(m.domain);
  out += " checksum=" + m.checksum;
  if (!m.created_at.empty()) out += " created_at=" + m.created_at;
  out += '\n';
  out += serialize_records(m.records);
  return out;
}

Manifest parse_manifest(std::string_view text) {
  const auto lines = split(text, '\n');
  if (lines.empty() || lines[0].substr(0, kMagic.size()) != kMagic) {
    throw CorruptError("manifest corrupted: missing SFMANIFEST v1 header");
  }
  Manifest m;
  bool have_domain = false, have_checksum = false;
  for (auto tok : split(lines[0].substr(kMagic.size()), ' ')) {
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) throw CorruptError("manifest corrupted: bad header token");
    const auto key = tok.substr(0, eq);
    const auto value = tok.substr(eq + 1);
    if (key == "domain") {
      m.domain = parse_domain(value);
      have_domain = true;
    } else if (key == "checksum") {
      m.checksum = std::string(value);
      have_checksum = true;
    } else if (key == "created_at") {
      m.created_at = std::string(value);
    } else {
      throw CorruptError("manifest corrupted: unknown header key '" + std::string(key) + "'");
    }
  }
  if (!have_domain || !have_checksum) throw CorruptError("manifest corrupted: incomplete header");

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (line.empty()) {
      if (i + 1 == lines.size()) break;
      throw ValidationError("manifest line " + std::to_string(i + 1) + ": empty record");
    }
    const auto fields = split(line, '\t');
    if (fields.size() != 5) {
      throw ValidationError("manifest line " + std::to_string(i + 1) + ": expected 5 fields");
    }
    ImageRecord r;
    r.id = std::string(fields[0]);
    r.path = std::string(fields[1]);
    r.domain = m.domain;
    r.width = parse_dimension(fields[2], static_cast<int>(i + 1));
    r.height = parse_dimension(fields[3], static_cast<int>(i + 1));
    if (!fields[4].empty()) {
      for (auto t : split(fields[4], ',')) r.class_tags.emplace_back(t);
    }
    m.records.push_back(std::move(r));
  }
  if (m.checksum != compute_checksum(m.records)) throw CorruptError("manifest corrupted");
  validate_manifest(m);
  return m;
}

void write_manifest(const Manifest& m, const fs::path& path) {
  write_file_atomic(path, format_manifest(m));
}

Manifest read_manifest(const fs::path& path) {
  return parse_manifest(read_text_file(path));
}

}  // namespace stylefilter
