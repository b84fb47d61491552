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

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "stylefilter/error.hpp"
#include "stylefilter/extractor.hpp"
#include "stylefilter/fileio.hpp"
#include "temp_dir.hpp"

using namespace stylefilter;
namespace fs = std::filesystem;

namespace {

const fs::path kAsset = fs::path(STYLEFILTER_FIXTURES) / "tiny_taps.onnx";

ExtractorConfig tiny_cfg(const fs::path& asset = kAsset) {
  ExtractorConfig c = ExtractorConfig::onnx_defaults(asset);
  c.tap_layers = {"tap0", "tap1"};
  c.input_height = c.input_width = 32;
  return c;
}

// The generator script's probe input, fed to the network as is.
Tensor3 sin_input() {
  Tensor3 t(3, 32, 32);
  for (int c = 0; c < 3; ++c) {
    for (int h = 0; h < 32; ++h) {
      for (int w = 0; w < 32; ++w) {
        t.at(c, h, w) = static_cast<float>(std::sin(0.1 * (c * 1024 + h * 32 + w)));
      }
    }
  }
  return t;
}

std::vector<double> reference_vector() {
  std::ifstream in(fs::path(STYLEFILTER_FIXTURES) / "tiny_taps.reference.txt");
  std::string line;
  std::vector<double> v;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    v.push_back(std::stod(line));
  }
  return v;
}

void copy_asset(const TempDir& dir) {
  fs::copy_file(kAsset, dir / "tiny_taps.onnx");
}

#ifndef STYLEFILTER_HAS_ONNX
#define REQUIRE_ONNX() GTEST_SKIP() << "built without the ONNX backend"
#else
#define REQUIRE_ONNX() (void)0
#endif

}  // namespace

TEST(Onnx, FixtureParityWithReferenceFramework) {
  REQUIRE_ONNX();
  const auto ex = make_extractor(tiny_cfg());
  const std::vector<double> ref = reference_vector();
  ASSERT_EQ(ref.size(), 20u);
  const StyleVector sv = style_vector(ex->extract(sin_input()), "probe");
  ASSERT_EQ(sv.values.size(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(sv.values[i], ref[i], 1e-4) << "entry " << i;
}

TEST(Onnx, NativeChannelCountsAtTaps) {
  REQUIRE_ONNX();
  const auto ex = make_extractor(tiny_cfg());
  EXPECT_EQ(ex->tap_channels(), (std::vector<int>{4, 6}));
  EXPECT_EQ(ex->style_dim(), 20u);
  const auto maps = ex->extract(sin_input());
  ASSERT_EQ(maps.size(), 2u);
  EXPECT_EQ(maps[0].tensor.height, 32);
  EXPECT_EQ(maps[1].tensor.height, 16);
  EXPECT_EQ(maps[1].tap, "tap1");
}

TEST(Onnx, UnknownTapIsConfigErrorNamingIt) {
  REQUIRE_ONNX();
  ExtractorConfig c = tiny_cfg();
  c.tap_layers = {"tap0", "tap9"};
  try {
    make_extractor(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("tap9"), std::string::npos) << e.what();
  }
}

TEST(Onnx, WrongInputSizeIsRejected) {
  REQUIRE_ONNX();
  const auto ex = make_extractor(tiny_cfg());
  EXPECT_THROW(ex->extract(Tensor3(3, 16, 16)), ValidationError);
}

TEST(Onnx, MissingAssetIsConfigError) {
  EXPECT_THROW(make_extractor(tiny_cfg("/nonexistent/model.onnx")), ConfigError);
  EXPECT_THROW(extractor_fingerprint(tiny_cfg("/nonexistent/model.onnx")), ConfigError);
}

TEST(Onnx, HashManifestMustMatchAsset) {
  TempDir dir;
  copy_asset(dir);
  write_file_atomic(dir / "tiny_taps.hash.json",
                    "{\"sha256\": \"" + std::string(64, '0') + "\", \"taps\": []}\n");
  EXPECT_THROW(extractor_fingerprint(tiny_cfg(dir / "tiny_taps.onnx")), ConfigError);
}

TEST(Onnx, HashManifestChannelWidthsChecked) {
  REQUIRE_ONNX();
  TempDir dir;
  copy_asset(dir);
  const std::string good = read_text_file(fs::path(STYLEFILTER_FIXTURES) / "tiny_taps.hash.json");
  std::string bad = good;
  bad.replace(bad.find("\"channels\": 6"), 13, "\"channels\": 7");
  write_file_atomic(dir / "tiny_taps.hash.json", bad);
  EXPECT_THROW(make_extractor(tiny_cfg(dir / "tiny_taps.onnx")), ConfigError);
  write_file_atomic(dir / "tiny_taps.hash.json", good);
  EXPECT_NO_THROW(make_extractor(tiny_cfg(dir / "tiny_taps.onnx")));
}

TEST(Onnx, FingerprintBindsAssetContent) {
  TempDir dir;
  copy_asset(dir);
  const Digest a = extractor_fingerprint(tiny_cfg(dir / "tiny_taps.onnx"));
  EXPECT_EQ(a, extractor_fingerprint(tiny_cfg()));  // same bytes, other path
  {
    std::ofstream out(dir / "tiny_taps.onnx", std::ios::app | std::ios::binary);
    out << '\0';
  }
  EXPECT_NE(a, extractor_fingerprint(tiny_cfg(dir / "tiny_taps.onnx")));
}

TEST(Onnx, RepeatedForwardIsBitIdentical) {
  REQUIRE_ONNX();
  const auto ex = make_extractor(tiny_cfg());
  const Tensor3 in = sin_input();
  const auto a = style_vector(ex->extract(in), "a").values;
  const auto b = style_vector(ex->extract(in), "b").values;
  EXPECT_EQ(a, b);
}

// Optional check against a full exported VGG-19 asset; set
// STYLEFILTER_VGG19_ASSET to its path to enable.
TEST(Onnx, Vgg19TapWidths) {
  REQUIRE_ONNX();
  const char* asset = std::getenv("STYLEFILTER_VGG19_ASSET");
  if (!asset) GTEST_SKIP() << "STYLEFILTER_VGG19_ASSET not set";
  const auto ex = make_extractor(ExtractorConfig::onnx_defaults(asset));
  EXPECT_EQ(ex->tap_channels(), (std::vector<int>{64, 128, 256, 512, 512}));
  EXPECT_EQ(ex->style_dim(), 2944u);
}
