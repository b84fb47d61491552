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

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "stylefilter/image.hpp"
#include "stylefilter/manifest.hpp"

namespace stylefilter::testkit {

enum class Shape { arc, rect, trapezoid };

std::string_view to_string(Shape s);
Shape parse_shape(std::string_view text);

/// Style parameters of one synthetic production line.
struct FactorySpec {
  std::string name;
  double background_level = 0.5;
  double contrast_gain = 1.0;
  double texture_frequency = 8.0;    // cycles per image width
  double texture_orientation = 0.0;  // degrees
  double noise_sigma = 0.02;
  Shape shape = Shape::rect;
  double defect_rate = 0.3;
  std::uint64_t seed = 1;

  // Throws ValidationError.
  void validate() const;
};

struct SynthDatasetSpec {
  std::vector<FactorySpec> factories;
  std::string target;  // name of the target factory
  int images_per_factory = 100;
  int image_size = 256;
  std::filesystem::path output_dir = "synth";
  // Shared by all factories so defects sit at the same places everywhere.
  std::uint64_t defect_seed = 7;

  void validate() const;
};

// Renders image `index` of a factory. Fully determined by the arguments.
Image render_image(const FactorySpec& spec, int index, int size,
                   std::uint64_t defect_seed = 7);

// Writes n PNGs as <out_dir>/img_NNNN.png and returns their manifest (paths
// relative to out_dir, class tag "factory=<name>").
Manifest generate_factory(const FactorySpec& spec, int n, int size,
                          const std::filesystem::path& out_dir, Domain domain,
                          std::uint64_t defect_seed = 7);

struct Benchmark {
  Manifest source;
  Manifest target;
  std::filesystem::path source_manifest_path;
  std::filesystem::path target_manifest_path;
};

// Images under <output_dir>/<factory>/, manifests source.sfmanifest and
// target.sfmanifest in output_dir with paths relative to it.
Benchmark generate_benchmark(const SynthDatasetSpec& spec);

// A, B and the target share background 0.5, contrast 1.0, frequency 8;
// factory C sits at background 0.9, contrast 2.5, frequency 32.
SynthDatasetSpec near_far_benchmark(const std::filesystem::path& output_dir,
                                    int images_per_factory = 100, int image_size = 256);

// Sectioned key-value text: [dataset] plus one [factory.<name>] per factory.
SynthDatasetSpec parse_synth_spec(std::string_view text,
                                  const std::filesystem::path& base_dir = {});
std::string format_synth_spec(const SynthDatasetSpec& spec);

}  // namespace stylefilter::testkit
