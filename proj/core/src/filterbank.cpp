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

#include "stylefilter/filterbank.hpp"

#include <cmath>
#include <numbers>

#include "stylefilter/error.hpp"

namespace stylefilter::filterbank {

namespace {

constexpr int kRadius = kKernelSize / 2;
using Weights = std::array<double, kKernelSize * kKernelSize>;

template <class F>
Weights tabulate(F f) {
  Weights w{};
  for (int y = -kRadius; y <= kRadius; ++y) {
    for (int x = -kRadius; x <= kRadius; ++x) {
      w[(y + kRadius) * kKernelSize + (x + kRadius)] = f(static_cast<double>(x), static_cast<double>(y));
    }
  }
  return w;
}

double gaussian(double x, double y, double sigma) {
  return std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
}

// Removes the DC response by subtracting a multiple of the Gaussian envelope,
// then scales to unit L2 norm.
Weights zero_mean_unit_norm(Weights w, double envelope_sigma) {
  const Weights env = tabulate([&](double x, double y) { return gaussian(x, y, envelope_sigma); });
  double sw = 0.0, se = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sw += w[i];
    se += env[i];
  }
  const double alpha = sw / se;
  double norm = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] -= alpha * env[i];
    norm += w[i] * w[i];
  }
  norm = std::sqrt(norm);
  for (auto& v : w) v /= norm;
  return w;
}

std::vector<Kernel> build_bank() {
  std::vector<Kernel> bank;
  bank.push_back({"dc", tabulate([](double, double) { return 1.0 / (kKernelSize * kKernelSize); }), false});

  const double log_sigma = 1.0;
  bank.push_back({"log", zero_mean_unit_norm(tabulate([&](double x, double y) {
                                               const double r2 = (x * x + y * y) / (2.0 * log_sigma * log_sigma);
                                               return -(1.0 - r2) * std::exp(-r2);
                                             }),
                                             log_sigma),
                  true});

  const double deriv_sigma = 1.5;
  for (int diag = 0; diag < 2; ++diag) {
    const double sx = std::numbers::sqrt2 / 2.0;
    const double sy = diag == 0 ? sx : -sx;
    bank.push_back({diag == 0 ? "ddiag45" : "ddiag135",
                    zero_mean_unit_norm(tabulate([&](double x, double y) {
                                          const double t = x * sx + y * sy;
                                          return -t * gaussian(x, y, deriv_sigma);
                                        }),
                                        deriv_sigma),
                    true});
  }

  const double gabor_sigma = 2.0;
  const double wavelength = 4.0;
  for (int deg : {0, 45, 90, 135}) {
    const double th = deg * std::numbers::pi / 180.0;
    const double c = std::cos(th), s = std::sin(th);
    for (bool odd : {false, true}) {
      auto w = tabulate([&](double x, double y) {
        const double phase = 2.0 * std::numbers::pi * (x * c + y * s) / wavelength;
        return gaussian(x, y, gabor_sigma) * (odd ? std::sin(phase) : std::cos(phase));
      });
      bank.push_back({std::string(odd ? "gabor_odd" : "gabor_even") + std::to_string(deg),
                      zero_mean_unit_norm(w, gabor_sigma), true});
    }
  }
  return bank;
}

struct Plane {
  int height = 0;
  int width = 0;
  std::vector<double> values;
  double at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

Plane pool2(const Plane& in) {
  Plane out{in.height / 2, in.width / 2, {}};
  out.values.resize(static_cast<std::size_t>(out.height) * out.width);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.values[static_cast<std::size_t>(y) * out.width + x] =
          0.25 * (in.at(2 * y, 2 * x) + in.at(2 * y, 2 * x + 1) + in.at(2 * y + 1, 2 * x) +
                  in.at(2 * y + 1, 2 * x + 1));
    }
  }
  return out;
}

Tensor3 apply_bank(const Plane& in) {
  const auto& bank = kernels();
  const int oh = in.height - kKernelSize + 1;
  const int ow = in.width - kKernelSize + 1;
  if (oh < 1 || ow < 1) throw ConfigError("filterbank: octave input smaller than the 7x7 kernel");
  Tensor3 out(kChannels, oh, ow);
  for (int c = 0; c < kChannels; ++c) {
    const Kernel& k = bank[static_cast<std::size_t>(c)];
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        double acc = 0.0;
        for (int dy = 0; dy < kKernelSize; ++dy) {
          const double* row = &in.values[static_cast<std::size_t>(y + dy) * in.width + x];
          const double* wrow = &k.weights[static_cast<std::size_t>(dy) * kKernelSize];
          for (int dx = 0; dx < kKernelSize; ++dx) acc += wrow[dx] * row[dx];
        }
        out.at(c, y, x) = k.rectify ? std::abs(acc) : acc;
      }
    }
  }
  return out;
}

}  // namespace

const std::vector<Kernel>& kernels() {
  static const std::vector<Kernel> bank = build_bank();
  return bank;
}

std::string octave_tap_name(int octave) { return "octave" + std::to_string(octave); }

int parse_octave_tap(const std::string& tap) {
  for (int o = 0; o < kOctaves; ++o) {
    if (tap == octave_tap_name(o)) return o;
  }
  throw ConfigError("filterbank: unknown tap '" + tap + "' (expected octave0..octave" +
                    std::to_string(kOctaves - 1) + ")");
}

std::vector<FeatureMap> run(const Tensor3& input, std::span<const int> octaves) {
  if (input.channels < 1) throw ValidationError("filterbank: empty input");
  Plane lum{input.height, input.width, std::vector<double>(input.plane_size(), 0.0)};
  const double inv = 1.0 / input.channels;
  for (int c = 0; c < input.channels; ++c) {
    for (std::size_t i = 0; i < lum.values.size(); ++i) {
      lum.values[i] += input.values[static_cast<std::size_t>(c) * input.plane_size() + i];
    }
  }
  for (auto& v : lum.values) v *= inv;

  std::vector<FeatureMap> maps;
  int current = 0;
  for (int octave : octaves) {
    while (current < octave) {
      lum = pool2(lum);
      ++current;
    }
    maps.push_back({octave, octave_tap_name(octave), apply_bank(lum)});
  }
  return maps;
}

}  // namespace stylefilter::filterbank
