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

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stylefilter/error.hpp"
#include "stylefilter/hash.hpp"
#include "stylefilter/image.hpp"
#include "stylefilter/manifest.hpp"
#include "stylefilter/matrix.hpp"

namespace stylefilter {

/// Channel-major C x H x W tensor.
struct Tensor3 {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> values;

  Tensor3() = default;
  Tensor3(int c, int h, int w, double fill = 0.0)
      : channels(c), height(h), width(w),
        values(static_cast<std::size_t>(c) * h * w, fill) {}

  double& at(int c, int y, int x) {
    return values[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  double at(int c, int y, int x) const {
    return values[(static_cast<std::size_t>(c) * height + y) * width + x];
  }

  std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
};

/// Activations at one tap point; layer_index is the tap's depth ordinal.
struct FeatureMap {
  int layer_index = 0;
  std::string tap;
  Tensor3 tensor;
};

struct StyleVector {
  std::string image_id;
  // Per layer: [mean_1..mean_C, var_1..var_C], layers in depth order.
  std::vector<double> values;
  Digest extractor_fingerprint{};
};

enum class Backend { onnx, filterbank };

std::string_view to_string(Backend b);
Backend parse_backend(std::string_view text);

struct Normalization {
  std::array<double, 3> mean{0.5, 0.5, 0.5};
  std::array<double, 3> std{0.5, 0.5, 0.5};
};

struct ExtractorConfig {
  Backend backend = Backend::filterbank;
  std::vector<std::string> tap_layers;
  int input_height = 224;
  int input_width = 224;
  Normalization normalization;
  std::optional<std::filesystem::path> asset_path;

  // octave0..octave2, 224x224, mean/std 0.5.
  static ExtractorConfig filterbank_defaults();
  // tap0..tap4, 224x224, ImageNet mean/std.
  static ExtractorConfig onnx_defaults(std::filesystem::path asset);

  // Throws ConfigError.
  void validate() const;
};

/// A backend mapping a preprocessed 3 x H x W tensor to per-tap activations.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;

  // One map per configured tap, in depth order.
  virtual std::vector<FeatureMap> extract(const Tensor3& input) const = 0;
  // Native channel count at each configured tap.
  virtual std::vector<int> tap_channels() const = 0;

  std::size_t style_dim() const;
};

// Throws ConfigError when the backend is unavailable or its asset is missing
// or incompatible with the tap list.
std::unique_ptr<FeatureExtractor> make_extractor(const ExtractorConfig& cfg);

// Hash of backend id, taps, preprocessing parameters and model asset hash.
Digest extractor_fingerprint(const ExtractorConfig& cfg);

// Bilinear resize (half-pixel centres, edge clamp) to cfg's input size,
// scale to [0,1], then per-channel (x - mean) / std.
Tensor3 preprocess(const Image& image, const ExtractorConfig& cfg);
// Same, from a 1- or 3-channel image already scaled to [0,1].
Tensor3 preprocess(const Tensor3& rgb_unit, const ExtractorConfig& cfg);

std::vector<FeatureMap> extract_feature_maps(const Tensor3& input,
                                             const ExtractorConfig& cfg);

// Channel-wise mean and population variance of every map, concatenated.
// Throws ValidationError naming the layer and channel on a non-finite value.
StyleVector style_vector(const std::vector<FeatureMap>& maps, std::string image_id);

/// Style vectors of one manifest, rows in manifest order. Values are stored
/// at the cache's f32 precision whether freshly computed or loaded.
struct StyleVectorSet {
  Digest fingerprint{};
  std::size_t dim = 0;
  std::vector<std::string> ids;
  Matrix values;
};

struct ExtractionOutcome {
  StyleVectorSet vectors;
  std::size_t extracted = 0;  // images run through the backend this call
  bool cache_hit = false;
};

struct ImageFailure {
  std::string id;
  std::string path;
  std::string reason;
};

class ExtractionError : public Error {
 public:
  explicit ExtractionError(std::vector<ImageFailure> failures);
  const std::vector<ImageFailure>& failures() const noexcept { return failures_; }

 private:
  std::vector<ImageFailure> failures_;
};

class FingerprintMismatch : public Error {
 public:
  using Error::Error;
};

// Extracts every record (paths resolved against base_dir) and persists them
// to cache_path. An existing cache with the same fingerprint and id list is
// reused; one with a different fingerprint raises FingerprintMismatch.
ExtractionOutcome extract_dataset(const Manifest& m,
                                  const std::filesystem::path& base_dir,
                                  const ExtractorConfig& cfg,
                                  const std::filesystem::path& cache_path,
                                  int threads = 1);

}  // namespace stylefilter
