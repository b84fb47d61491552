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

#include "stylefilter/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "stylefilter/config.hpp"
#include "stylefilter/error.hpp"
#include "stylefilter/rng.hpp"

namespace fs = std::filesystem;

namespace stylefilter::testkit {

namespace {

// Synthetic data has no acquisition time; a fixed stamp keeps manifests
// reproducible byte for byte.
constexpr const char* kSynthTimestamp = "1970-01-01T00:00:00Z";

constexpr double kTileDelta = -0.15;
constexpr double kTextureAmplitude = 0.08;
constexpr double kDefectDelta = -0.2;

bool in_shape(Shape shape, double u, double v) {
  switch (shape) {
    case Shape::rect:
      return u >= 0.15 && u <= 0.85 && v >= 0.2 && v <= 0.8;
    case Shape::trapezoid: {
      if (v < 0.2 || v > 0.8) return false;
      const double half = 0.25 + (v - 0.2) / 0.6 * 0.15;
      return std::abs(u - 0.5) <= half;
    }
    case Shape::arc: {
      const double r = std::hypot(u - 0.5, v - 1.2);
      return r >= 0.5 && r <= 0.95 && v >= 0.1 && std::abs(u - 0.5) <= 0.42;
    }
  }
  return false;
}

struct Defect {
  bool present = false;
  double cx = 0.5, cy = 0.5, rx = 0.05, ry = 0.03, angle = 0.0;
};

Defect draw_defect(std::uint64_t defect_seed, int index, double rate) {
  Rng rng(derive_seed(defect_seed, static_cast<std::uint64_t>(index)));
  Defect d;
  // Every draw happens regardless of presence so placement is identical for
  // factories with different defect rates.
  const double u = rng.uniform();
  d.cx = rng.uniform(0.35, 0.65);
  d.cy = rng.uniform(0.35, 0.65);
  d.rx = rng.uniform(0.03, 0.08);
  d.ry = rng.uniform(0.02, 0.05);
  d.angle = rng.uniform(0.0, std::numbers::pi);
  d.present = u < rate;
  return d;
}

bool in_defect(const Defect& d, double u, double v) {
  if (!d.present) return false;
  const double c = std::cos(d.angle), s = std::sin(d.angle);
  const double du = u - d.cx, dv = v - d.cy;
  const double a = (du * c + dv * s) / d.rx;
  const double b = (-du * s + dv * c) / d.ry;
  return a * a + b * b <= 1.0;
}

double parse_double(const ConfigEntry& e) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("synth spec line " + std::to_string(e.line) + ": '" + e.key + "' expects a number");
  }
}

long long parse_integer(const ConfigEntry& e) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("synth spec line " + std::to_string(e.line) + ": '" + e.key + "' expects an integer");
  }
}

std::string fmt_double(double v) {
  return fmt::format("{}", v);  // shortest round-trip form
}

}  // namespace

std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::arc: return "arc";
    case Shape::rect: return "rect";
    case Shape::trapezoid: return "trapezoid";
  }
  return "rect";
}

Shape parse_shape(std::string_view text) {
  if (text == "arc") return Shape::arc;
  if (text == "rect") return Shape::rect;
  if (text == "trapezoid") return Shape::trapezoid;
  throw ConfigError("unknown shape '" + std::string(text) + "'");
}

void FactorySpec::validate() const {
  auto fail = [&](const std::string& what) { throw ValidationError("factory '" + name + "': " + what); };
  if (name.empty()) throw ValidationError("factory name is empty");
  if (name.find_first_of("/\\\t\n ,") != std::string::npos) fail("name must be a plain word");
  if (!(background_level >= 0.0 && background_level <= 1.0)) fail("background_level outside [0,1]");
  if (!(contrast_gain > 0.0)) fail("contrast_gain must be > 0");
  if (!(texture_frequency >= 0.0)) fail("texture_frequency must be >= 0");
  if (!std::isfinite(texture_orientation)) fail("texture_orientation must be finite");
  if (!(noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
  if (!(defect_rate >= 0.0 && defect_rate <= 1.0)) fail("defect_rate outside [0,1]");
}

void SynthDatasetSpec::validate() const {
  if (factories.empty()) throw ValidationError("synth spec: no factories");
  if (images_per_factory < 1) throw ValidationError("synth spec: images_per_factory must be >= 1");
  if (image_size < 8) throw ValidationError("synth spec: image_size must be >= 8");
  std::set<std::string> names;
  for (const auto& f : factories) {
    f.validate();
    if (!names.insert(f.name).second) throw ValidationError("synth spec: duplicate factory '" + f.name + "'");
  }
}

Image render_image(const FactorySpec& spec, int index, int size, std::uint64_t defect_seed) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(index)));
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const Defect defect = draw_defect(defect_seed, index, spec.defect_rate);
  const double th = spec.texture_orientation * std::numbers::pi / 180.0;
  const double c = std::cos(th), s = std::sin(th);

  Image img(size, size);
  for (int y = 0; y < size; ++y) {
    const double v = (y + 0.5) / size;
    for (int x = 0; x < size; ++x) {
      const double u = (x + 0.5) / size;
      double value = spec.background_level;
      if (in_shape(spec.shape, u, v)) {
        double t = kTileDelta + kTextureAmplitude *
                                    std::sin(2.0 * std::numbers::pi * spec.texture_frequency * (u * c + v * s) + phase);
        if (in_defect(defect, u, v)) t += kDefectDelta;
        value += spec.contrast_gain * t;
      }
      if (spec.noise_sigma > 0.0) value += spec.noise_sigma * rng.normal();
      const auto level = static_cast<std::uint8_t>(std::lround(std::clamp(value, 0.0, 1.0) * 255.0));
      for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = level;
    }
  }
  return img;
}

Manifest generate_factory(const FactorySpec& spec, int n, int size, const fs::path& out_dir, Domain domain,
                          std::uint64_t defect_seed) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<ImageRecord> records;
  for (int i = 0; i < n; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "img_%04d.png", i);
    write_png(out_dir / name, render_image(spec, i, size, defect_seed));
    ImageRecord r;
    r.id = make_record_id(domain, static_cast<std::size_t>(i));
    r.path = name;
    r.width = size;
    r.height = size;
    r.class_tags = {"factory=" + spec.name};
    records.push_back(std::move(r));
  }
  return make_manifest(domain, std::move(records), kSynthTimestamp);
}

Benchmark generate_benchmark(const SynthDatasetSpec& spec) {
  spec.validate();
  if (spec.factories.size() < 2) throw ValidationError("synth spec: need at least 2 factories");
  const auto target_it = std::find_if(spec.factories.begin(), spec.factories.end(),
                                      [&](const FactorySpec& f) { return f.name == spec.target; });
  if (spec.target.empty() || target_it == spec.factories.end()) {
    throw ValidationError("synth spec: designated target factory '" + spec.target + "' not found");
  }

  std::vector<const FactorySpec*> sources;
  for (const auto& f : spec.factories) {
    if (f.name != spec.target) sources.push_back(&f);
  }
  // Lexicographic path order over "<factory>/img_NNNN.png".
  std::sort(sources.begin(), sources.end(), [](const auto* a, const auto* b) { return a->name < b->name; });

  std::vector<ImageRecord> src_records;
  for (const auto* f : sources) {
    const Manifest m = generate_factory(*f, spec.images_per_factory, spec.image_size, spec.output_dir / f->name,
                                        Domain::source, spec.defect_seed);
    for (auto r : m.records) {
      r.id = make_record_id(Domain::source, src_records.size());
      r.path = f->name + "/" + r.path;
      src_records.push_back(std::move(r));
    }
  }
  const Manifest t = generate_factory(*target_it, spec.images_per_factory, spec.image_size,
                                      spec.output_dir / target_it->name, Domain::target, spec.defect_seed);
  std::vector<ImageRecord> tgt_records = t.records;
  for (auto& r : tgt_records) r.path = target_it->name + "/" + r.path;

  Benchmark b;
  b.source = make_manifest(Domain::source, std::move(src_records), kSynthTimestamp);
  b.target = make_manifest(Domain::target, std::move(tgt_records), kSynthTimestamp);
  b.source_manifest_path = spec.output_dir / "source.sfmanifest";
  b.target_manifest_path = spec.output_dir / "target.sfmanifest";
  write_manifest(b.source, b.source_manifest_path);
  write_manifest(b.target, b.target_manifest_path);
  return b;
}

SynthDatasetSpec near_far_benchmark(const fs::path& output_dir, int images_per_factory, int image_size) {
  SynthDatasetSpec spec;
  spec.output_dir = output_dir;
  spec.images_per_factory = images_per_factory;
  spec.image_size = image_size;
  spec.target = "T";
  auto near = [](std::string name, std::uint64_t seed) {
    FactorySpec f;
    f.name = std::move(name);
    f.background_level = 0.5;
    f.contrast_gain = 1.0;
    f.texture_frequency = 8.0;
    f.texture_orientation = 30.0;
    f.noise_sigma = 0.02;
    f.shape = Shape::rect;
    f.defect_rate = 0.3;
    f.seed = seed;
    return f;
  };
  FactorySpec far = near("C", 13);
  far.background_level = 0.9;
  far.contrast_gain = 2.5;
  far.texture_frequency = 32.0;
  spec.factories = {near("A", 11), near("B", 12), far, near("T", 14)};
  return spec;
}

SynthDatasetSpec parse_synth_spec(std::string_view text, const fs::path& base_dir) {
  SynthDatasetSpec spec;
  spec.factories.clear();
  bool have_output = false;
  for (const ConfigEntry& e : parse_sectioned(text)) {
    if (e.section == "dataset") {
      if (e.key == "images_per_factory") spec.images_per_factory = static_cast<int>(parse_integer(e));
      else if (e.key == "image_size") spec.image_size = static_cast<int>(parse_integer(e));
      else if (e.key == "output_dir") {
        spec.output_dir = e.value;
        have_output = true;
      } else if (e.key == "target") spec.target = e.value;
      else if (e.key == "defect_seed") spec.defect_seed = static_cast<std::uint64_t>(parse_integer(e));
      else throw ConfigError("synth spec line " + std::to_string(e.line) + ": unknown key [dataset] " + e.key);
      continue;
    }
    if (e.section.rfind("factory.", 0) != 0) {
      throw ConfigError("synth spec line " + std::to_string(e.line) + ": unknown section [" + e.section + "]");
    }
    const std::string name = e.section.substr(8);
    auto it = std::find_if(spec.factories.begin(), spec.factories.end(),
                           [&](const FactorySpec& f) { return f.name == name; });
    if (it == spec.factories.end()) {
      FactorySpec f;
      f.name = name;
      spec.factories.push_back(f);
      it = std::prev(spec.factories.end());
    }
    FactorySpec& f = *it;
    if (e.key == "background_level") f.background_level = parse_double(e);
    else if (e.key == "contrast_gain") f.contrast_gain = parse_double(e);
    else if (e.key == "texture_frequency") f.texture_frequency = parse_double(e);
    else if (e.key == "texture_orientation") f.texture_orientation = parse_double(e);
    else if (e.key == "noise_sigma") f.noise_sigma = parse_double(e);
    else if (e.key == "shape") f.shape = parse_shape(e.value);
    else if (e.key == "defect_rate") f.defect_rate = parse_double(e);
    else if (e.key == "seed") f.seed = static_cast<std::uint64_t>(parse_integer(e));
    else throw ConfigError("synth spec line " + std::to_string(e.line) + ": unknown key [" + e.section + "] " + e.key);
  }
  if (have_output && spec.output_dir.is_relative() && !base_dir.empty()) spec.output_dir = base_dir / spec.output_dir;
  spec.validate();
  return spec;
}

std::string format_synth_spec(const SynthDatasetSpec& spec) {
  std::string out = "[dataset]\n";
  out += "images_per_factory = " + std::to_string(spec.images_per_factory) + "\n";
  out += "image_size = " + std::to_string(spec.image_size) + "\n";
  out += "output_dir = " + spec.output_dir.string() + "\n";
  out += "target = " + spec.target + "\n";
  out += "defect_seed = " + std::to_string(spec.defect_seed) + "\n";
  for (const auto& f : spec.factories) {
    out += "\n[factory." + f.name + "]\n";
    out += "background_level = " + fmt_double(f.background_level) + "\n";
    out += "contrast_gain = " + fmt_double(f.contrast_gain) + "\n";
    out += "texture_frequency = " + fmt_double(f.texture_frequency) + "\n";
    out += "texture_orientation = " + fmt_double(f.texture_orientation) + "\n";
    out += "noise_sigma = " + fmt_double(f.noise_sigma) + "\n";
    out += "shape = " + std::string(to_string(f.shape)) + "\n";
    out += "defect_rate = " + fmt_double(f.defect_rate) + "\n";
    out += "seed = " + std::to_string(f.seed) + "\n";
  }
  return out;
}

}  // namespace stylefilter::testkit
