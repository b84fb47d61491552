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

#include "onnx_backend.hpp"

#include "stylefilter/error.hpp"

namespace stylefilter::detail {

bool onnx_backend_available() { return false; }

std::unique_ptr<FeatureExtractor> make_onnx_extractor(const ExtractorConfig&) {
  throw ConfigError("onnx backend not available in this build (rebuild with OpenCV dnn)");
}

Digest onnx_asset_hash(const std::filesystem::path& asset) {
  if (!std::filesystem::exists(asset)) throw ConfigError("onnx asset not found: " + asset.string());
  return sha256_file(asset);
}

}  // namespace stylefilter::detail
