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

#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>

#include <json.hpp>
#include <mutex>

#include "stylefilter/error.hpp"
#include "stylefilter/fileio.hpp"

namespace fs = std::filesystem;

namespace stylefilter::detail {

namespace {

fs::path hash_manifest_path(const fs::path& asset) {
  fs::path p = asset;
  p.replace_extension(".hash.json");
  return p;
}

struct AssetMetadata {
  std::optional<std::string> sha256;
  std::vector<std::pair<std::string, int>> taps;
};

std::optional<AssetMetadata> read_metadata(const fs::path& asset) {
  const fs::path p = hash_manifest_path(asset);
  if (!fs::exists(p)) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(read_text_file(p));
    AssetMetadata meta;
    if (j.contains("sha256")) meta.sha256 = j.at("sha256").get<std::string>();
    if (j.contains("taps")) {
      for (const auto& t : j.at("taps")) {
        meta.taps.emplace_back(t.at("name").get<std::string>(), t.at("channels").get<int>());
      }
    }
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("onnx asset metadata " + p.string() + " is malformed: " + e.what());
  }
}

class OnnxExtractor final : public FeatureExtractor {
 public:
  explicit OnnxExtractor(const ExtractorConfig& cfg)
      : taps_(cfg.tap_layers), height_(cfg.input_height), width_(cfg.input_width) {
    const fs::path asset = *cfg.asset_path;
    try {
      cv::setNumThreads(1);
      net_ = cv::dnn::readNetFromONNX(asset.string());
      net_.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
      net_.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);
    } catch (const cv::Exception& e) {
      throw ConfigError("onnx asset " + asset.string() + " cannot be loaded for tap " + taps_.front() +
                        ": " + e.what());
    }
    for (const auto& tap : taps_) {
      if (net_.getLayerId(tap) < 0) {
        throw ConfigError("onnx asset " + asset.string() + " has no output named '" + tap + "'");
      }
    }
    // Channel counts come from a probe pass at the configured input size.
    Tensor3 probe(3, height_, width_);
    std::vector<FeatureMap> maps;
    try {
      maps = extract(probe);
    } catch (const cv::Exception& e) {
      throw ConfigError("onnx asset " + asset.string() + " rejected a 3x" + std::to_string(height_) +
                        "x" + std::to_string(width_) + " input at tap " + taps_.front() + ": " + e.what());
    }
    for (const auto& m : maps) channels_.push_back(m.tensor.channels);

    if (auto meta = read_metadata(asset)) {
      for (const auto& [name, channels] : meta->taps) {
        for (std::size_t i = 0; i < taps_.size(); ++i) {
          if (taps_[i] == name && channels_[i] != channels) {
            throw ConfigError("onnx tap " + name + " has " + std::to_string(channels_[i]) +
                              " channels but the asset metadata declares " + std::to_string(channels));
          }
        }
      }
    }
  }

  std::vector<FeatureMap> extract(const Tensor3& input) const override {
    if (input.channels != 3 || input.height != height_ || input.width != width_) {
      throw ValidationError("onnx backend: input must be 3x" + std::to_string(height_) + "x" +
                            std::to_string(width_));
    }
    const int dims[4] = {1, 3, height_, width_};
    cv::Mat blob(4, dims, CV_32F);
    float* dst = blob.ptr<float>();
    for (std::size_t i = 0; i < input.values.size(); ++i) dst[i] = static_cast<float>(input.values[i]);

    std::vector<cv::Mat> outs;
    {
      std::lock_guard<std::mutex> lock(mu_);
      net_.setInput(blob);
      std::vector<cv::String> names(taps_.begin(), taps_.end());
      net_.forward(outs, names);
    }
    std::vector<FeatureMap> maps;
    for (std::size_t t = 0; t < taps_.size(); ++t) {
      const cv::Mat& o = outs[t];
      if (o.dims != 4 || o.size[0] != 1) {
        throw ConfigError("onnx tap " + taps_[t] + " is not an NCHW activation");
      }
      Tensor3 tensor(o.size[1], o.size[2], o.size[3]);
      const float* src = o.ptr<float>();
      for (std::size_t i = 0; i < tensor.values.size(); ++i) tensor.values[i] = src[i];
      maps.push_back({static_cast<int>(t), taps_[t], std::move(tensor)});
    }
    return maps;
  }

  std::vector<int> tap_channels() const override { return channels_; }

 private:
  std::vector<std::string> taps_;
  int height_;
  int width_;
  std::vector<int> channels_;
  mutable std::mutex mu_;
  mutable cv::dnn::Net net_;
};

}  // namespace

bool onnx_backend_available() { return true; }

std::unique_ptr<FeatureExtractor> make_onnx_extractor(const ExtractorConfig& cfg) {
  if (!cfg.asset_path || !fs::exists(*cfg.asset_path)) {
    throw ConfigError("onnx asset not found" +
                      (cfg.asset_path ? ": " + cfg.asset_path->string() : std::string{}) +
                      " (required for tap " + cfg.tap_layers.front() + ")");
  }
  return std::make_unique<OnnxExtractor>(cfg);
}

Digest onnx_asset_hash(const fs::path& asset) {
  if (!fs::exists(asset)) throw ConfigError("onnx asset not found: " + asset.string());
  const Digest d = sha256_file(asset);
  if (auto meta = read_metadata(asset); meta && meta->sha256 && *meta->sha256 != to_hex(d)) {
    throw ConfigError("onnx asset " + asset.string() + " does not match its hash manifest");
  }
  return d;
}

}  // namespace stylefilter::detail
