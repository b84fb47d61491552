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

#include <benchmark/benchmark.h>

#include <random>

#include "stylefilter/clustering.hpp"
#include "stylefilter/extractor.hpp"
#include "stylefilter/filter.hpp"
#include "stylefilter/projection.hpp"
#include "stylefilter/testkit.hpp"

using namespace stylefilter;

namespace {

Matrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> nd;
  Matrix m(n, d);
  for (auto& v : m.data()) v = nd(g);
  return m;
}

void BM_FilterbankStyleVector(benchmark::State& state) {
  ExtractorConfig cfg = ExtractorConfig::filterbank_defaults();
  cfg.input_height = cfg.input_width = static_cast<int>(state.range(0));
  testkit::FactorySpec f;
  f.name = "A";
  const Tensor3 input = preprocess(testkit::render_image(f, 0, 256), cfg);
  const auto extractor = make_extractor(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(style_vector(extractor->extract(input), "x"));
  }
}
BENCHMARK(BM_FilterbankStyleVector)->Arg(64)->Arg(224)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const Matrix points = random_matrix(static_cast<std::size_t>(state.range(0)), 72, 1);
  KMeansOptions o;
  o.k = 7;
  o.restarts = 10;
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(points, o));
}
BENCHMARK(BM_KMeans)->Arg(300)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_Silhouette(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix points = random_matrix(n, 72, 2);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 7);
  for (auto _ : state) benchmark::DoNotOptimize(silhouette(points, labels));
}
BENCHMARK(BM_Silhouette)->Arg(300)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_CentroidClustering(benchmark::State& state) {
  const Matrix src = random_matrix(7, 72, 3), tgt = random_matrix(3, 72, 4);
  std::vector<LabeledCentroid> s, t;
  for (std::size_t i = 0; i < 7; ++i) {
    s.push_back({static_cast<int>(i), Domain::source, {src.row(i).begin(), src.row(i).end()}, 10});
  }
  for (std::size_t i = 0; i < 3; ++i) {
    t.push_back({static_cast<int>(i), Domain::target, {tgt.row(i).begin(), tgt.row(i).end()}, 10});
  }
  const CentroidSet cs = CentroidSet::from(s, t);
  const std::vector<int> ks{2, 3, 4};
  for (auto _ : state) benchmark::DoNotOptimize(cluster_centroids(cs, ks, {}));
}
BENCHMARK(BM_CentroidClustering);

void BM_Pca(benchmark::State& state) {
  const Matrix points = random_matrix(static_cast<std::size_t>(state.range(0)), 72, 5);
  for (auto _ : state) benchmark::DoNotOptimize(pca_project(points));
}
BENCHMARK(BM_Pca)->Arg(300)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Tsne(benchmark::State& state) {
  const Matrix points = random_matrix(static_cast<std::size_t>(state.range(0)), 72, 6);
  TsneParams p;
  p.iterations = 250;
  for (auto _ : state) benchmark::DoNotOptimize(tsne_project(points, p));
}
BENCHMARK(BM_Tsne)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
