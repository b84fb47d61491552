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

#include <gtest/gtest.h>

#include <random>

#include "stylefilter/error.hpp"
#include "stylefilter/fileio.hpp"
#include "stylefilter/hash.hpp"
#include "stylefilter/image.hpp"
#include "stylefilter/manifest.hpp"
#include "temp_dir.hpp"

using namespace stylefilter;

namespace {

void write_gray_png(const std::filesystem::path& p, int w, int h, std::uint8_t v) {
  std::filesystem::create_directories(p.parent_path());
  write_png(p, Image(w, h, v));
}

Manifest sample_manifest(Domain d, std::size_t n, std::mt19937_64& g) {
  std::vector<ImageRecord> recs;
  for (std::size_t i = 0; i < n; ++i) {
    ImageRecord r;
    r.id = make_record_id(d, i);
    r.path = "dir/img_" + std::to_string(i) + ".png";
    r.width = 1 + static_cast<int>(g() % 500);
    r.height = 1 + static_cast<int>(g() % 500);
    const auto tags = g() % 3;
    for (std::uint64_t t = 0; t < tags; ++t) r.class_tags.push_back("tag" + std::to_string(g() % 5));
    recs.push_back(r);
  }
  return make_manifest(d, std::move(recs), "2026-01-02T03:04:05Z");
}

}  // namespace

TEST(Manifest, RecordIdsAreZeroPaddedOrdinals) {
  EXPECT_EQ(make_record_id(Domain::source, 42), "src-000042");
  EXPECT_EQ(make_record_id(Domain::target, 0), "tgt-000000");
}

TEST(Manifest, BuildEnumeratesInLexicographicOrder) {
  TempDir dir;
  write_gray_png(dir / "c.png", 3, 2, 10);
  write_gray_png(dir / "a.png", 4, 5, 20);
  write_gray_png(dir / "b.png", 6, 7, 30);
  const BuildResult r = build_manifest(dir.path(), Domain::target, "*.png");
  ASSERT_EQ(r.manifest.records.size(), 3u);
  EXPECT_TRUE(r.rejected.empty());
  EXPECT_EQ(r.manifest.records[0].path, "a.png");
  EXPECT_EQ(r.manifest.records[1].path, "b.png");
  EXPECT_EQ(r.manifest.records[2].path, "c.png");
  EXPECT_EQ(r.manifest.records[0].id, "tgt-000000");
  EXPECT_EQ(r.manifest.records[0].width, 4);
  EXPECT_EQ(r.manifest.records[0].height, 5);
  for (const auto& rec : r.manifest.records) EXPECT_EQ(rec.domain, Domain::target);
}

TEST(Manifest, BuildWithNoMatchesFails) {
  TempDir dir;
  write_file_atomic(dir / "notes.txt", "x");
  try {
    build_manifest(dir.path(), Domain::source, "*.png");
    FAIL() << "expected an error";
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "no images found");
  }
}

TEST(Manifest, BuildOnMissingDirectoryIsIoError) {
  EXPECT_THROW(build_manifest("/nonexistent/images", Domain::source, "*.png"), IoError);
}

TEST(Manifest, CorruptFilesAreReportedNotDropped) {
  TempDir dir;
  write_gray_png(dir / "a.png", 3, 3, 1);
  write_gray_png(dir / "b.png", 3, 3, 2);
  write_file_atomic(dir / "broken.png", "\x89PNG garbage");
  const BuildResult r = build_manifest(dir.path(), Domain::source, "*.png");
  EXPECT_EQ(r.manifest.records.size(), 2u);
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].path, "broken.png");
  EXPECT_FALSE(r.rejected[0].reason.empty());
}

TEST(Manifest, GlobMatchesSubdirectoryPaths) {
  TempDir dir;
  write_gray_png(dir / "x/1.png", 2, 2, 1);
  write_gray_png(dir / "y/2.png", 2, 2, 1);
  const BuildResult r = build_manifest(dir.path(), Domain::source, "x/*.png");
  ASSERT_EQ(r.manifest.records.size(), 1u);
  EXPECT_EQ(r.manifest.records[0].path, "x/1.png");
}

TEST(Manifest, BuildTwiceIsIdenticalBarTimestamp) {
  TempDir dir;
  for (int i = 0; i < 5; ++i) write_gray_png(dir / ("i" + std::to_string(i) + ".png"), 2 + i, 2, 9);
  BuildResult a = build_manifest(dir.path(), Domain::source, "*.png");
  BuildResult b = build_manifest(dir.path(), Domain::source, "*.png");
  a.manifest.created_at.clear();
  b.manifest.created_at.clear();
  EXPECT_EQ(a.manifest, b.manifest);
}

TEST(Manifest, RoundTripProperty) {
  std::mt19937_64 g(3);
  TempDir dir;
  for (int trial = 0; trial < 50; ++trial) {
    const Domain d = trial % 2 ? Domain::source : Domain::target;
    const Manifest m = sample_manifest(d, g() % 20, g);
    const auto p = dir / "m.sfmanifest";
    write_manifest(m, p);
    EXPECT_EQ(read_manifest(p), m);
    EXPECT_EQ(parse_manifest(format_manifest(m)), m);
  }
}

TEST(Manifest, HeaderAndRecordFormat) {
  ImageRecord r{"src-000000", "a/b.png", Domain::source, {"x", "y"}, 4, 3};
  const Manifest m = make_manifest(Domain::source, {r}, "");
  const std::string text = format_manifest(m);
  EXPECT_EQ(text.substr(0, 36), "SFMANIFEST v1 domain=source checksum");
  EXPECT_NE(text.find("\nsrc-000000\ta/b.png\t4\t3\tx,y\n"), std::string::npos);
  EXPECT_EQ(m.checksum, to_hex(sha256(std::string("src-000000\ta/b.png\t4\t3\tx,y\n"))));
}

TEST(Manifest, HandEditedChecksumIsCorrupted) {
  std::mt19937_64 g(1);
  const Manifest m = sample_manifest(Domain::source, 4, g);
  std::string text = format_manifest(m);
  const auto pos = text.find("checksum=") + 9;
  text[pos] = text[pos] == '0' ? '1' : '0';
  try {
    parse_manifest(text);
    FAIL() << "expected corruption";
  } catch (const CorruptError& e) {
    EXPECT_STREQ(e.what(), "manifest corrupted");
  }
}

TEST(Manifest, EditedRecordIsCorrupted) {
  std::mt19937_64 g(2);
  const Manifest m = sample_manifest(Domain::source, 4, g);
  std::string text = format_manifest(m);
  text.replace(text.find("img_1"), 5, "img_9");
  EXPECT_THROW(parse_manifest(text), CorruptError);
}

TEST(Manifest, DuplicateIdIsValidationError) {
  ImageRecord a{"src-000000", "a.png", Domain::source, {}, 1, 1};
  ImageRecord b{"src-000000", "b.png", Domain::source, {}, 1, 1};
  EXPECT_THROW(make_manifest(Domain::source, {a, b}), ValidationError);
  // Also when the file's own checksum is consistent.
  const std::string body = serialize_records({a, b});
  const std::string text =
      "SFMANIFEST v1 domain=source checksum=" + to_hex(sha256(body)) + "\n" + body;
  EXPECT_THROW(parse_manifest(text), ValidationError);
}

TEST(Manifest, InvariantsEnforced) {
  ImageRecord empty_path{"src-000000", "", Domain::source, {}, 1, 1};
  EXPECT_THROW(make_manifest(Domain::source, {empty_path}), ValidationError);
  ImageRecord zero{"src-000000", "a.png", Domain::source, {}, 0, 1};
  EXPECT_THROW(make_manifest(Domain::source, {zero}), ValidationError);
  ImageRecord bad_tag{"src-000000", "a.png", Domain::source, {"a,b"}, 1, 1};
  EXPECT_THROW(make_manifest(Domain::source, {bad_tag}), ValidationError);
}

TEST(Manifest, MixedDomainsRejected) {
  std::mt19937_64 g(4);
  Manifest m = sample_manifest(Domain::source, 3, g);
  m.records[1].domain = Domain::target;
  EXPECT_THROW(validate_manifest(m), ValidationError);
}

TEST(Manifest, TimestampNotCovered) {
  std::mt19937_64 g(5);
  Manifest a = sample_manifest(Domain::source, 3, g);
  Manifest b = a;
  b.created_at = "2030-01-01T00:00:00Z";
  EXPECT_EQ(a.checksum, compute_checksum(b.records));
  EXPECT_NO_THROW(parse_manifest(format_manifest(b)));
}

TEST(Manifest, DomainParsing) {
  EXPECT_EQ(parse_domain("source"), Domain::source);
  EXPECT_EQ(parse_domain("target"), Domain::target);
  EXPECT_THROW(parse_domain("sauce"), ValidationError);
}
