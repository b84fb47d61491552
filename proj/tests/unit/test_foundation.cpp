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

#include <fstream>
#include <set>
#include <thread>

#include "stylefilter/error.hpp"
#include "stylefilter/fileio.hpp"
#include "stylefilter/hash.hpp"
#include "stylefilter/image.hpp"
#include "stylefilter/matrix.hpp"
#include "stylefilter/rng.hpp"
#include "temp_dir.hpp"

using namespace stylefilter;

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(to_hex(sha256("")), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(to_hex(sha256("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Sha256, IncrementalMatchesOneShot) {
  Sha256 h;
  h.update("ab").update("c");
  EXPECT_EQ(h.finish(), sha256("abc"));
}

TEST(Sha256, HexRoundTripAndRejectsGarbage) {
  const Digest d = sha256("style");
  EXPECT_EQ(digest_from_hex(to_hex(d)), d);
  EXPECT_THROW(digest_from_hex("abc"), ValidationError);
  EXPECT_THROW(digest_from_hex(std::string(64, 'g')), ValidationError);
}

TEST(Sha256, FileMatchesText) {
  TempDir dir;
  write_file_atomic(dir / "f.txt", "abc");
  EXPECT_EQ(sha256_file(dir / "f.txt"), sha256("abc"));
}

TEST(FileIo, AtomicWriteReplacesAndLeavesNoTemporaries) {
  TempDir dir;
  const auto p = dir / "a.txt";
  write_file_atomic(p, "one");
  write_file_atomic(p, "two");
  EXPECT_EQ(read_text_file(p), "two");
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 1);
}

TEST(FileIo, MissingFileIsIoError) {
  EXPECT_THROW(read_text_file("/nonexistent/definitely/missing"), IoError);
}

TEST(DirectoryLock, SecondLockFailsUntilReleased) {
  TempDir dir;
  {
    DirectoryLock a(dir.path());
    EXPECT_THROW(DirectoryLock b(dir.path()), Error);
  }
  EXPECT_NO_THROW(DirectoryLock c(dir.path()));
}

TEST(DirectoryLock, StaleLockIsTakenOver) {
  TempDir dir;
  // A pid that cannot be alive.
  write_file_atomic(dir / ".stylefilter.lock", "2147483646\n");
  EXPECT_NO_THROW(DirectoryLock l(dir.path()));
}

TEST(Rng, DeterministicAndSeedSensitive) {
  Rng a(5), b(5), c(6);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    (void)c;
  }
  EXPECT_NE(Rng(5).next_u64(), Rng(6).next_u64());
}

TEST(Rng, UniformAndBelowRanges) {
  Rng r(1);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    ASSERT_LT(r.below(7), 7u);
  }
  EXPECT_NEAR(sum / 20000, 0.5, 0.01);
}

TEST(Rng, NormalMoments) {
  Rng r(9);
  double s = 0.0, s2 = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.02);
  EXPECT_NEAR(s2 / n, 1.0, 0.03);
}

TEST(Rng, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 100; ++i) seen.insert(derive_seed(42, i));
  seen.insert(derive_seed(42, "cluster:source"));
  seen.insert(derive_seed(42, "cluster:target"));
  EXPECT_EQ(seen.size(), 102u);
  EXPECT_EQ(derive_seed(42, "x"), derive_seed(42, "x"));
}

TEST(Matrix, SelectAndStack) {
  const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
  const std::vector<std::size_t> idx{2, 0};
  const Matrix s = m.select_rows(idx);
  EXPECT_EQ(s, Matrix::from_rows({{5, 6}, {1, 2}}));
  const Matrix st = Matrix::stack(s, m);
  EXPECT_EQ(st.rows(), 5u);
  EXPECT_EQ(st(4, 1), 6.0);
  EXPECT_THROW(Matrix::stack(m, Matrix(1, 3)), ValidationError);
  EXPECT_THROW(Matrix::from_rows({{1, 2}, {3}}), ValidationError);
}

TEST(Png, RoundTripRgb) {
  TempDir dir;
  Image img(5, 3);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 5; ++x) {
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<std::uint8_t>(x * 40 + y * 10 + c);
    }
  }
  write_png(dir / "a.png", img);
  EXPECT_EQ(read_png(dir / "a.png"), img);
}

TEST(Png, CorruptFileIsIoError) {
  TempDir dir;
  write_file_atomic(dir / "bad.png", "definitely not a png");
  EXPECT_THROW(read_png(dir / "bad.png"), IoError);
}

TEST(StageError, PrefixesStage) {
  const StageError e("filter", "boom");
  EXPECT_EQ(e.stage(), "filter");
  EXPECT_EQ(std::string(e.what()), "stage 'filter': boom");
}
