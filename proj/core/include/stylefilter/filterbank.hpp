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
#include <span>
#include <string>
#include <vector>

#include "stylefilter/extractor.hpp"

namespace stylefilter::filterbank {

inline constexpr int kKernelSize = 7;
inline constexpr int kChannels = 12;
inline constexpr int kOctaves = 3;
inline constexpr int kDcChannel = 0;

struct Kernel {
  std::string name;
  std::array<double, kKernelSize * kKernelSize> weights{};
  // Band-pass responses are rectified (absolute value); the DC average is
  // kept linear so its statistics stay monotone in brightness.
  bool rectify = true;
};

// Fixed, seed-free bank: DC average, Laplacian of Gaussian, two diagonal
// derivatives, even/odd Gabor pairs at 0/45/90/135 degrees.
const std::vector<Kernel>& kernels();

std::string octave_tap_name(int octave);
// Throws ConfigError for names other than octave0..octave2.
int parse_octave_tap(const std::string& tap);

// Runs the bank on the per-pixel channel mean of `input` at each requested
// octave (ascending). Valid convolution; 2x mean-pooling between octaves.
std::vector<FeatureMap> run(const Tensor3& input, std::span<const int> octaves);

}  // namespace stylefilter::filterbank
