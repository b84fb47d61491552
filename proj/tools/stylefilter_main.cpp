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

// stylefilter: command-line front end for the curation pipeline.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stylefilter/config.hpp"
#include "stylefilter/error.hpp"
#include "stylefilter/fileio.hpp"
#include "stylefilter/manifest.hpp"
#include "stylefilter/pipeline.hpp"
#include "stylefilter/report.hpp"
#include "stylefilter/testkit.hpp"

namespace fs = std::filesystem;
namespace sf = stylefilter;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool verbose = false;
};

sf::PipelineConfig resolve_config(const GlobalOptions& g) {
  if (g.config.empty()) throw sf::ConfigError("--config <path> is required for this subcommand");
  sf::PipelineConfig cfg = sf::load_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  if (g.threads) cfg.threads = *g.threads;
  cfg.verbose = g.verbose;
  cfg.validate();
  for (const auto& w : cfg.warnings()) std::cerr << "warning: " << w << "\n";
  return cfg;
}

void print_summary(const sf::RunReport& r, const fs::path& report_path) {
  std::cout << "removed source clusters:";
  if (r.filter.removed_source_clusters.empty()) std::cout << " none";
  for (int c : r.filter.removed_source_clusters) std::cout << " " << c;
  std::cout << "\nkept " << r.filter.kept << ", removed " << r.filter.removed << "\n"
            << "extractions " << r.counters.extractions << ", clusterings " << r.counters.clusterings << "\n"
            << "report: " << report_path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Style-space filtering of a source image domain against a target domain"};
  app.set_version_flag("--version", sf::tool_version());
  app.require_subcommand(1);
  // Global flags are accepted before or after the subcommand.
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "Pipeline configuration file");
  app.add_option("--seed", g.seed, "Override [run] seed");
  app.add_option("--threads", g.threads, "Override [run] threads")->check(CLI::PositiveNumber);
  app.add_flag("--verbose", g.verbose, "Log stage decisions to stderr");

  auto* synth = app.add_subcommand("synth", "Render a synthetic multi-factory dataset");
  std::string spec_path;
  std::string near_far_dir;
  std::string emit_spec;
  int images = 100;
  int size = 256;
  synth->add_option("spec", spec_path, "Synthetic dataset spec (defaults to [paths] synth_spec)");
  synth->add_option("--near-far", near_far_dir, "Render the default near/far benchmark into this directory");
  synth->add_option("--images", images, "Images per factory for --near-far")->check(CLI::PositiveNumber);
  synth->add_option("--size", size, "Image size for --near-far")->check(CLI::Range(8, 4096));
  synth->add_option("--emit-spec", emit_spec, "With --near-far: also write its spec to this path");

  auto* extract = app.add_subcommand("extract", "Compute style vectors for both domains");

  auto* diagnose = app.add_subcommand("diagnose-k", "SSE and silhouette over candidate k");
  std::string diag_domain = "both";
  diagnose->add_option("--domain", diag_domain, "source, target or both")
      ->check(CLI::IsMember({"source", "target", "both"}));

  auto* cluster = app.add_subcommand("cluster", "k-means within each domain");
  std::string cluster_domain = "both";
  cluster->add_option("--domain", cluster_domain, "source, target or both")
      ->check(CLI::IsMember({"source", "target", "both"}));

  auto* filter = app.add_subcommand("filter", "Cluster centroids and write the filtered source manifest");

  auto* project = app.add_subcommand("project", "2-D projections of style vectors or centroids");
  std::string subject = "all";
  project->add_option("--subject", subject, "source, target, centroids or all")
      ->check(CLI::IsMember({"source", "target", "centroids", "all"}));

  auto* run = app.add_subcommand("run", "Run every stage, skipping those that are up to date");

  auto* manifest = app.add_subcommand("manifest", "Build a manifest from an image directory");
  std::string root, domain = "source", glob = "*.png", out;
  manifest->add_option("--root", root, "Image directory")->required();
  manifest->add_option("--domain", domain, "source or target")->check(CLI::IsMember({"source", "target"}));
  manifest->add_option("--glob", glob, "Root-relative path pattern");
  manifest->add_option("--out", out, "Output manifest (default <root>/<domain>.sfmanifest)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed() && !near_far_dir.empty()) {
      const auto spec = sf::testkit::near_far_benchmark(near_far_dir, images, size);
      const auto b = sf::testkit::generate_benchmark(spec);
      if (!emit_spec.empty()) sf::write_file_atomic(emit_spec, sf::testkit::format_synth_spec(spec));
      std::cout << b.source_manifest_path.string() << "\n" << b.target_manifest_path.string() << "\n";
      return 0;
    }
    if (synth->parsed() && !spec_path.empty() && g.config.empty()) {
      const fs::path p(spec_path);
      const auto spec = sf::testkit::parse_synth_spec(sf::read_text_file(p), p.parent_path());
      const auto b = sf::testkit::generate_benchmark(spec);
      std::cout << b.source_manifest_path.string() << "\n" << b.target_manifest_path.string() << "\n";
      return 0;
    }
    if (manifest->parsed()) {
      const sf::Domain d = sf::parse_domain(domain);
      const sf::BuildResult br = sf::build_manifest(root, d, glob);
      for (const auto& r : br.rejected) std::cerr << "rejected " << r.path << ": " << r.reason << "\n";
      const fs::path dest = out.empty() ? fs::path(root) / (domain + ".sfmanifest") : fs::path(out);
      sf::Manifest m = br.manifest;
      // Paths are stored relative to the manifest's own directory.
      const fs::path base = fs::absolute(dest).parent_path().lexically_normal();
      const fs::path rootabs = fs::absolute(root).lexically_normal();
      if (base != rootabs) {
        for (auto& r : m.records) r.path = (rootabs / r.path).lexically_relative(base).generic_string();
        m = sf::make_manifest(d, std::move(m.records), m.created_at);
      }
      sf::write_manifest(m, dest);
      std::cout << dest.string() << " (" << m.records.size() << " images)\n";
      return 0;
    }

    sf::Pipeline pipeline(resolve_config(g));
    auto domains = [](const std::string& s) {
      if (s == "source") return std::vector<sf::Domain>{sf::Domain::source};
      if (s == "target") return std::vector<sf::Domain>{sf::Domain::target};
      return std::vector<sf::Domain>{sf::Domain::source, sf::Domain::target};
    };

    if (synth->parsed()) {
      pipeline.synth();
    } else if (extract->parsed()) {
      pipeline.extract();
      std::cout << "extractions " << pipeline.counters().extractions << "\n";
    } else if (diagnose->parsed()) {
      for (sf::Domain d : domains(diag_domain)) {
        const sf::KDiagnostics k = pipeline.diagnose_k(d);
        std::cout << sf::to_string(d) << ": silhouette suggests k=" << k.suggested_k_silhouette;
        if (k.suggested_k_elbow) std::cout << ", elbow suggests k=" << *k.suggested_k_elbow;
        std::cout << " (" << pipeline.paths().diagnostics_table(d).string() << ")\n";
      }
    } else if (cluster->parsed()) {
      for (sf::Domain d : domains(cluster_domain)) pipeline.cluster(d);
    } else if (filter->parsed()) {
      print_summary(pipeline.filter(), pipeline.paths().report());
    } else if (project->parsed()) {
      if (subject == "all") {
        for (const char* s : {"source", "target", "centroids"}) pipeline.project(sf::parse_projection_subject(s));
      } else {
        pipeline.project(sf::parse_projection_subject(subject));
      }
    } else if (run->parsed()) {
      print_summary(pipeline.run(), pipeline.paths().report());
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
