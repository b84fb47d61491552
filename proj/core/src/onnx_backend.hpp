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

#include <memory>

#include "stylefilter/extractor.hpp"

namespace stylefilter::detail {

bool onnx_backend_available();

// Multi-output forward pass over an exported model whose tap activations are
// named graph outputs.
std::unique_ptr<FeatureExtractor> make_onnx_extractor(const ExtractorConfig& cfg);

// Asset content hash. When "<asset>.hash.json" exists its recorded sha256
// must agree with the file.
Digest onnx_asset_hash(const std::filesystem::path& asset);

}  // namespace stylefilter::detail
