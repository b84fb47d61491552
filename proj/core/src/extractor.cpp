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

#include "stylefilter/extractor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "onnx_backend.hpp"
#include "stylefilter/filterbank.hpp"
#include "stylefilter/style_cache.hpp"

namespace fs = std::filesystem;

namespace stylefilter {

std::string_view to_string(Backend b) { return b == Backend::onnx ? "onnx" : "filterbank"; }

Backend parse_backend(std::string_view text) {
  if (text == "onnx") return Backend::onnx;
  if (text == "filterbank") return Backend::filterbank;
  throw ConfigError("unknown extractor backend '" + std::string(text) + "'");
}

ExtractorConfig ExtractorConfig::filterbank_defaults() {
  ExtractorConfig cfg;
  cfg.backend = Backend::filterbank;
  for (int o = 0; o < filterbank::kOctaves; ++o) cfg.tap_layers.push_back(filterbank::octave_tap_name(o));
  return cfg;
}

ExtractorConfig ExtractorConfig::onnx_defaults(fs::path asset) {
  ExtractorConfig cfg;
  cfg.backend = Backend::onnx;
  cfg.tap_layers = {"tap0", "tap1", "tap2", "tap3", "tap4"};
  cfg.normalization.mean = {0.485, 0.456, 0.406};
  cfg.normalization.std = {0.229, 0.224, 0.225};
  cfg.asset_path = std::move(asset);
  return cfg;
}

void ExtractorConfig::validate() const {
  if (tap_layers.empty()) throw ConfigError("extractor: tap list is empty");
  if (input_height < 32 || input_width < 32) {
    throw ConfigError("extractor: input size must be at least 32x32");
  }
  for (double s : normalization.std) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("extractor: normalization std must be > 0");
  }
  for (double m : normalization.mean) {
    if (!std::isfinite(m)) throw ConfigError("extractor: normalization mean must be finite");
  }
  std::set<std::string> seen;
  for (const auto& t : tap_layers) {
    if (!seen.insert(t).second) throw ConfigError("extractor: duplicate tap '" + t + "'");
  }
  if (backend == Backend::filterbank) {
    int prev = -1;
    for (const auto& t : tap_layers) {
      const int o = filterbank::parse_octave_tap(t);
      if (o <= prev) throw ConfigError("extractor: taps must be strictly depth-ordered (at '" + t + "')");
      prev = o;
    }
    if (asset_path) throw ConfigError("extractor: filterbank backend takes no asset");
  } else if (!asset_path) {
    throw ConfigError("extractor: onnx backend requires an asset path (tap " + tap_layers.front() + ")");
  }
}

std::size_t FeatureExtractor::style_dim() const {
  std::size_t d = 0;
  for (int c : tap_channels()) d += 2 * static_cast<std::size_t>(c);
  return d;
}

namespace {

class FilterbankExtractor final : public FeatureExtractor {
 public:
  explicit FilterbankExtractor(const ExtractorConfig& cfg) {
    for (const auto& t : cfg.tap_layers) octaves_.push_back(filterbank::parse_octave_tap(t));
  }
  std::vector<FeatureMap> extract(const Tensor3& input) const override {
    return filterbank::run(input, octaves_);
  }
  std::vector<int> tap_channels() const override {
    return std::vector<int>(octaves_.size(), filterbank::kChannels);
  }

 private:
  std::vector<int> octaves_;
};

std::string format_double(double v) {
  return fmt::format("{}", v);  // shortest round-trip form
}

}  // namespace

std::unique_ptr<FeatureExtractor> make_extractor(const ExtractorConfig& cfg) {
  cfg.validate();
  if (cfg.backend == Backend::filterbank) return std::make_unique<FilterbankExtractor>(cfg);
  return detail::make_onnx_extractor(cfg);
}

Digest extractor_fingerprint(const ExtractorConfig& cfg) {
  cfg.validate();
  std::string canon = "stylefilter-extractor v1\n";
  canon += "backend=" + std::string(to_string(cfg.backend)) + "\n";
  canon += "taps=";
  for (std::size_t i = 0; i < cfg.tap_layers.size(); ++i) {
    if (i) canon += ',';
    canon += cfg.tap_layers[i];
  }
  canon += "\ninput=" + std::to_string(cfg.input_height) + "x" + std::to_string(cfg.input_width) + "\n";
  canon += "mean=";
  for (double m : cfg.normalization.mean) canon += format_double(m) + ",";
  canon += "\nstd=";
  for (double s : cfg.normalization.std) canon += format_double(s) + ",";
  canon += "\n";
  if (cfg.backend == Backend::filterbank) {
    canon += "asset=filterbank-7x7x12-v1\n";
  } else {
    canon += "asset=" + to_hex(detail::onnx_asset_hash(*cfg.asset_path)) + "\n";
  }
  return sha256(canon);
}

namespace {

Tensor3 resize_normalize(int in_w, int in_h, int channels,
                         const std::function<double(int, int, int)>& sample,
                         const ExtractorConfig& cfg) {
  if (in_w < 1 || in_h < 1) throw ValidationError("preprocess: zero-area image");
  const int out_h = cfg.input_height;
  const int out_w = cfg.input_width;
  auto coords = [](int out, int in, int n_out) {
    std::vector<std::pair<int, double>> map(static_cast<std::size_t>(n_out));
    for (int o = 0; o < n_out; ++o) {
      double s = (o + 0.5) * static_cast<double>(in) / n_out - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(in - 1));
      const int i0 = static_cast<int>(std::floor(s));
      map[static_cast<std::size_t>(o)] = {i0, s - i0};
    }
    (void)out;
    return map;
  };
  const auto xs = coords(out_w, in_w, out_w);
  const auto ys = coords(out_h, in_h, out_h);
  Tensor3 out(3, out_h, out_w);
  for (int c = 0; c < 3; ++c) {
    const int src_c = channels == 1 ? 0 : c;
    const double mean = cfg.normalization.mean[static_cast<std::size_t>(c)];
    const double inv_std = 1.0 / cfg.normalization.std[static_cast<std::size_t>(c)];
    for (int y = 0; y < out_h; ++y) {
      const auto [y0, fy] = ys[static_cast<std::size_t>(y)];
      const int y1 = std::min(y0 + 1, in_h - 1);
      for (int x = 0; x < out_w; ++x) {
        const auto [x0, fx] = xs[static_cast<std::size_t>(x)];
        const int x1 = std::min(x0 + 1, in_w - 1);
        // a + f (b - a) keeps flat regions exact.
        const double p00 = sample(src_c, y0, x0), p01 = sample(src_c, y0, x1);
        const double p10 = sample(src_c, y1, x0), p11 = sample(src_c, y1, x1);
        const double top = p00 + fx * (p01 - p00);
        const double bottom = p10 + fx * (p11 - p10);
        const double v = top + fy * (bottom - top);
        out.at(c, y, x) = (v - mean) * inv_std;
      }
    }
  }
  return out;
}

}  // namespace

Tensor3 preprocess(const Image& image, const ExtractorConfig& cfg) {
  if (image.width < 1 || image.height < 1) throw ValidationError("preprocess: zero-area image");
  return resize_normalize(
      image.width, image.height, 3,
      [&](int c, int y, int x) { return image.at(x, y, c) / 255.0; }, cfg);
}

Tensor3 preprocess(const Tensor3& rgb_unit, const ExtractorConfig& cfg) {
  if (rgb_unit.channels != 1 && rgb_unit.channels != 3) {
    throw ValidationError("preprocess: expected 1 or 3 channels");
  }
  return resize_normalize(
      rgb_unit.width, rgb_unit.height, rgb_unit.channels,
      [&](int c, int y, int x) { return rgb_unit.at(c, y, x); }, cfg);
}

std::vector<FeatureMap> extract_feature_maps(const Tensor3& input, const ExtractorConfig& cfg) {
  return make_extractor(cfg)->extract(input);
}

StyleVector style_vector(const std::vector<FeatureMap>& maps, std::string image_id) {
  if (maps.empty()) throw ValidationError("style_vector: no feature maps");
  StyleVector sv;
  sv.image_id = std::move(image_id);
  for (std::size_t m = 0; m < maps.size(); ++m) {
    if (m > 0 && maps[m].layer_index <= maps[m - 1].layer_index) {
      throw ValidationError("style_vector: feature maps are not depth-ordered");
    }
    const Tensor3& t = maps[m].tensor;
    const std::size_t n = t.plane_size();
    if (t.channels < 1 || n == 0) throw ValidationError("style_vector: empty feature map");
    std::vector<double> means(static_cast<std::size_t>(t.channels));
    std::vector<double> vars(static_cast<std::size_t>(t.channels));
    for (int c = 0; c < t.channels; ++c) {
      const double* p = &t.values[static_cast<std::size_t>(c) * n];
      // Shifted by the first value so constant channels give exactly zero
      // variance.
      const double shift = p[0];
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(p[i])) {
          throw ValidationError("non-finite activation at layer " + std::to_string(maps[m].layer_index) +
                                " (" + maps[m].tap + ") channel " + std::to_string(c));
        }
        sum += p[i] - shift;
      }
      const double offset = sum / static_cast<double>(n);
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = (p[i] - shift) - offset;
        ss += d * d;
      }
      means[static_cast<std::size_t>(c)] = shift + offset;
      vars[static_cast<std::size_t>(c)] = ss / static_cast<double>(n);
    }
    sv.values.insert(sv.values.end(), means.begin(), means.end());
    sv.values.insert(sv.values.end(), vars.begin(), vars.end());
  }
  return sv;
}

ExtractionError::ExtractionError(std::vector<ImageFailure> failures)
    : Error([&] {
        std::string msg = std::to_string(failures.size()) + " image(s) could not be extracted:";
        for (const auto& f : failures) msg += "\n  " + f.id + " (" + f.path + "): " + f.reason;
        return msg;
      }()),
      failures_(std::move(failures)) {}

ExtractionOutcome extract_dataset(const Manifest& m, const fs::path& base_dir,
                                  const ExtractorConfig& cfg, const fs::path& cache_path,
                                  int threads) {
  const Digest fp = extractor_fingerprint(cfg);
  std::vector<std::string> ids;
  ids.reserve(m.records.size());
  for (const auto& r : m.records) ids.push_back(r.id);

  if (fs::exists(cache_path)) {
    const StyleCacheHeader header = read_style_cache_header(cache_path);
    if (header.fingerprint != fp) {
      throw FingerprintMismatch("style cache " + cache_path.string() +
                                " was produced by a different extractor configuration (fingerprint " +
                                to_hex(header.fingerprint) + ", expected " + to_hex(fp) +
                                "); delete it to recompute or point at a new cache path");
    }
    StyleVectorSet cached = read_style_cache(cache_path);
    if (cached.ids == ids) return {std::move(cached), 0, true};
  }

  const auto extractor = make_extractor(cfg);
  const std::size_t dim = extractor->style_dim();
  const std::size_t n = m.records.size();
  std::vector<std::vector<double>> rows(n);
  std::vector<std::optional<std::string>> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const ImageRecord& r = m.records[i];
      try {
        const Image img = read_png(base_dir / r.path);
        StyleVector sv = style_vector(extractor->extract(preprocess(img, cfg)), r.id);
        if (sv.values.size() != dim) throw ValidationError("style vector dimension mismatch");
        rows[i] = std::move(sv.values);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  std::vector<ImageFailure> failures;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) failures.push_back({m.records[i].id, m.records[i].path, *errors[i]});
  }
  if (!failures.empty()) throw ExtractionError(std::move(failures));

  StyleVectorSet set;
  set.fingerprint = fp;
  set.dim = dim;
  set.ids = std::move(ids);
  set.values = Matrix(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      set.values(i, j) = static_cast<double>(static_cast<float>(rows[i][j]));
    }
  }
  write_style_cache(cache_path, set);
  return {std::move(set), n, false};
}

}  // namespace stylefilter
