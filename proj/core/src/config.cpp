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

#include "stylefilter/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <functional>
#include <map>

#include <fmt/format.h>

#include "stylefilter/error.hpp"
#include "stylefilter/fileio.hpp"

namespace fs = std::filesystem;

namespace stylefilter {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(',', start);
    const std::string item = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string fmt_double(double v) {
  return fmt::format("{}", v);  // shortest round-trip form
}

[[noreturn]] void bad_value(const ConfigEntry& e, const std::string& expected) {
  throw ConfigError("config line " + std::to_string(e.line) + ": [" + e.section + "] " + e.key + " expects " +
                    expected + " (got '" + e.value + "')");
}

double to_double(const ConfigEntry& e) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used == e.value.size()) return v;
  } catch (const std::exception&) {
  }
  bad_value(e, "a number");
}

long long to_int(const ConfigEntry& e) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(e.value, &used);
    if (used == e.value.size()) return v;
  } catch (const std::exception&) {
  }
  bad_value(e, "an integer");
}

bool to_bool(const ConfigEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes" || e.value == "on") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no" || e.value == "off") return false;
  bad_value(e, "true/false");
}

std::array<double, 3> to_triple(const ConfigEntry& e) {
  const auto items = split_list(e.value);
  if (items.size() != 3) bad_value(e, "three comma-separated numbers");
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    ConfigEntry sub = e;
    sub.value = items[i];
    out[i] = to_double(sub);
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

}  // namespace

std::vector<ConfigEntry> parse_sectioned(std::string_view text) {
  std::vector<ConfigEntry> out;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    ++line_no;
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    if (section.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": key outside of a section");
    ConfigEntry e{section, trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)),
                  line_no};
    if (e.key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) {
    const auto dash = item.find('-', 1);
    try {
      if (dash != std::string::npos) {
        const int lo = std::stoi(item.substr(0, dash));
        const int hi = std::stoi(item.substr(dash + 1));
        if (hi < lo) throw ConfigError("bad range '" + item + "'");
        for (int v = lo; v <= hi; ++v) out.push_back(v);
      } else {
        std::size_t used = 0;
        out.push_back(std::stoi(item, &used));
        if (used != item.size()) throw ConfigError("bad integer '" + item + "'");
      }
    } catch (const std::logic_error&) {
      throw ConfigError("bad integer list '" + std::string(text) + "'");
    }
  }
  return out;
}

std::string format_int_list(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::vector<std::string> PipelineConfig::warnings() const {
  std::vector<std::string> w;
  if (clustering.k_source < clustering.k_target) {
    w.push_back("k_source (" + std::to_string(clustering.k_source) + ") < k_target (" +
                std::to_string(clustering.k_target) + "); a finer source clustering is recommended");
  }
  return w;
}

void PipelineConfig::validate() const {
  extractor.validate();
  if (paths.output_dir.empty()) throw ConfigError("[paths] output_dir is empty");
  if (!paths.synth_spec && (paths.source_manifest.empty() || paths.target_manifest.empty())) {
    throw ConfigError("[paths] source_manifest and target_manifest are required unless synth_spec is set");
  }
  const auto& c = clustering;
  if (c.k_source < 1 || c.k_target < 1) throw ConfigError("[clustering] k_source and k_target must be >= 1");
  if (c.restarts < 1) throw ConfigError("[clustering] restarts must be >= 1");
  if (c.max_iter < 1) throw ConfigError("[clustering] max_iter must be >= 1");
  if (!(c.tol > 0.0)) throw ConfigError("[clustering] tol must be > 0");
  if (c.candidate_ks.empty()) throw ConfigError("[clustering] candidate_ks is empty");
  for (std::size_t i = 0; i < c.candidate_ks.size(); ++i) {
    if (c.candidate_ks[i] < 2 || (i && c.candidate_ks[i] <= c.candidate_ks[i - 1])) {
      throw ConfigError("[clustering] candidate_ks must be ascending values >= 2");
    }
  }
  for (int k : filter.centroid_candidate_ks) {
    if (k < 2) throw ConfigError("[filter] centroid_candidate_ks values must be >= 2");
  }
  if (filter.mode == RemovalMode::single_k && !filter.single_k && filter.centroid_candidate_ks.size() != 1) {
    throw ConfigError("[filter] mode single_k needs single_k or exactly one centroid candidate");
  }
  if (filter.single_k && filter.mode != RemovalMode::single_k) {
    throw ConfigError("[filter] single_k is only meaningful with mode = single_k");
  }
  if (projection.methods.empty() && projection.enable) throw ConfigError("[projection] methods is empty");
  if (!(projection.tsne_perplexity > 0.0)) throw ConfigError("[projection] tsne_perplexity must be > 0");
  if (projection.tsne_iterations < 1) throw ConfigError("[projection] tsne_iterations must be >= 1");
  if (projection.subsample_cap < 4) throw ConfigError("[projection] subsample_cap must be >= 4");
  if (threads < 1) throw ConfigError("[run] threads must be >= 1");
}

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
  const std::vector<ConfigEntry> entries = parse_sectioned(text);
  PipelineConfig cfg;

  // The backend decides the extractor defaults, so it is applied first.
  for (const auto& e : entries) {
    if (e.section == "extractor" && e.key == "backend") {
      const Backend b = parse_backend(e.value);
      cfg.extractor = b == Backend::onnx ? ExtractorConfig::onnx_defaults({}) : ExtractorConfig::filterbank_defaults();
      if (b == Backend::onnx) cfg.extractor.asset_path.reset();
    }
  }

  using Setter = std::function<void(const ConfigEntry&)>;
  const std::map<std::string, std::map<std::string, Setter>> keys = {
      {"paths",
       {{"source_manifest", [&](const ConfigEntry& e) { cfg.paths.source_manifest = resolve(base_dir, e.value); }},
        {"target_manifest", [&](const ConfigEntry& e) { cfg.paths.target_manifest = resolve(base_dir, e.value); }},
        {"output_dir", [&](const ConfigEntry& e) { cfg.paths.output_dir = resolve(base_dir, e.value); }},
        {"synth_spec", [&](const ConfigEntry& e) { cfg.paths.synth_spec = resolve(base_dir, e.value); }}}},
      {"extractor",
       {{"backend", [](const ConfigEntry&) {}},
        {"taps", [&](const ConfigEntry& e) { cfg.extractor.tap_layers = split_list(e.value); }},
        {"input_size",
         [&](const ConfigEntry& e) {
           const auto x = e.value.find('x');
           if (x == std::string::npos) bad_value(e, "HxW");
           ConfigEntry h = e, w = e;
           h.value = trim(std::string_view(e.value).substr(0, x));
           w.value = trim(std::string_view(e.value).substr(x + 1));
           cfg.extractor.input_height = static_cast<int>(to_int(h));
           cfg.extractor.input_width = static_cast<int>(to_int(w));
         }},
        {"norm_mean", [&](const ConfigEntry& e) { cfg.extractor.normalization.mean = to_triple(e); }},
        {"norm_std", [&](const ConfigEntry& e) { cfg.extractor.normalization.std = to_triple(e); }},
        {"asset", [&](const ConfigEntry& e) {
           if (!e.value.empty()) cfg.extractor.asset_path = resolve(base_dir, e.value);
         }}}},
      {"clustering",
       {{"k_source", [&](const ConfigEntry& e) { cfg.clustering.k_source = static_cast<int>(to_int(e)); }},
        {"k_target", [&](const ConfigEntry& e) { cfg.clustering.k_target = static_cast<int>(to_int(e)); }},
        {"restarts", [&](const ConfigEntry& e) { cfg.clustering.restarts = static_cast<int>(to_int(e)); }},
        {"max_iter", [&](const ConfigEntry& e) { cfg.clustering.max_iter = static_cast<int>(to_int(e)); }},
        {"tol", [&](const ConfigEntry& e) { cfg.clustering.tol = to_double(e); }},
        {"standardize", [&](const ConfigEntry& e) { cfg.clustering.standardize = to_bool(e); }},
        {"candidate_ks", [&](const ConfigEntry& e) { cfg.clustering.candidate_ks = parse_int_list(e.value); }}}},
      {"filter",
       {{"centroid_candidate_ks",
         [&](const ConfigEntry& e) {
           cfg.filter.centroid_candidate_ks = e.value == "auto" ? std::vector<int>{} : parse_int_list(e.value);
         }},
        {"mode", [&](const ConfigEntry& e) { cfg.filter.mode = parse_removal_mode(e.value); }},
        {"single_k", [&](const ConfigEntry& e) {
           if (e.value != "none") cfg.filter.single_k = static_cast<int>(to_int(e));
         }},
        {"weighted", [&](const ConfigEntry& e) { cfg.filter.weighted = to_bool(e); }}}},
      {"projection",
       {{"enable", [&](const ConfigEntry& e) { cfg.projection.enable = to_bool(e); }},
        {"methods",
         [&](const ConfigEntry& e) {
           cfg.projection.methods.clear();
           for (const auto& m : split_list(e.value)) cfg.projection.methods.push_back(parse_projection_method(m));
         }},
        {"tsne_perplexity", [&](const ConfigEntry& e) { cfg.projection.tsne_perplexity = to_double(e); }},
        {"tsne_iterations", [&](const ConfigEntry& e) { cfg.projection.tsne_iterations = static_cast<int>(to_int(e)); }},
        {"subsample_cap", [&](const ConfigEntry& e) {
           const long long v = to_int(e);
           if (v < 0) bad_value(e, "a non-negative integer");
           cfg.projection.subsample_cap = static_cast<std::size_t>(v);
         }}}},
      {"run",
       {{"seed", [&](const ConfigEntry& e) {
           const long long v = to_int(e);
           if (v < 0) bad_value(e, "a non-negative integer");
           cfg.seed = static_cast<std::uint64_t>(v);
         }},
        {"threads", [&](const ConfigEntry& e) { cfg.threads = static_cast<int>(to_int(e)); }}}},
  };

  std::map<std::pair<std::string, std::string>, int> seen;
  for (const auto& e : entries) {
    const auto sec = keys.find(e.section);
    if (sec == keys.end()) {
      throw ConfigError("config line " + std::to_string(e.line) + ": unknown section [" + e.section + "]");
    }
    const auto key = sec->second.find(e.key);
    if (key == sec->second.end()) {
      throw ConfigError("config line " + std::to_string(e.line) + ": invalid config key [" + e.section + "] " + e.key);
    }
    if (const auto [it, fresh] = seen.emplace(std::pair{e.section, e.key}, e.line); !fresh) {
      throw ConfigError("config line " + std::to_string(e.line) + ": [" + e.section + "] " + e.key +
                        " already set on line " + std::to_string(it->second));
    }
    try {
      key->second(e);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& err) {
      throw ConfigError("config line " + std::to_string(e.line) + ": " + err.what());
    }
  }
  // The default output directory is relative too.
  cfg.paths.output_dir = resolve(base_dir, cfg.paths.output_dir.string());
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  return parse_config(read_text_file(path), path.parent_path());
}

std::string format_config(const PipelineConfig& cfg) {
  auto triple = [](const std::array<double, 3>& t) {
    return fmt_double(t[0]) + "," + fmt_double(t[1]) + "," + fmt_double(t[2]);
  };
  std::string out;
  out += "[paths]\n";
  out += "source_manifest = " + cfg.paths.source_manifest.string() + "\n";
  out += "target_manifest = " + cfg.paths.target_manifest.string() + "\n";
  out += "output_dir = " + cfg.paths.output_dir.string() + "\n";
  if (cfg.paths.synth_spec) out += "synth_spec = " + cfg.paths.synth_spec->string() + "\n";
  out += "\n[extractor]\n";
  out += "backend = " + std::string(to_string(cfg.extractor.backend)) + "\n";
  out += "taps = ";
  for (std::size_t i = 0; i < cfg.extractor.tap_layers.size(); ++i) {
    out += (i ? "," : "") + cfg.extractor.tap_layers[i];
  }
  out += "\ninput_size = " + std::to_string(cfg.extractor.input_height) + "x" +
         std::to_string(cfg.extractor.input_width) + "\n";
  out += "norm_mean = " + triple(cfg.extractor.normalization.mean) + "\n";
  out += "norm_std = " + triple(cfg.extractor.normalization.std) + "\n";
  if (cfg.extractor.asset_path) out += "asset = " + cfg.extractor.asset_path->string() + "\n";
  out += "\n[clustering]\n";
  out += "k_source = " + std::to_string(cfg.clustering.k_source) + "\n";
  out += "k_target = " + std::to_string(cfg.clustering.k_target) + "\n";
  out += "restarts = " + std::to_string(cfg.clustering.restarts) + "\n";
  out += "max_iter = " + std::to_string(cfg.clustering.max_iter) + "\n";
  out += "tol = " + fmt_double(cfg.clustering.tol) + "\n";
  out += "standardize = " + std::string(cfg.clustering.standardize ? "true" : "false") + "\n";
  out += "candidate_ks = " + format_int_list(cfg.clustering.candidate_ks) + "\n";
  out += "\n[filter]\n";
  out += "centroid_candidate_ks = " +
         (cfg.filter.centroid_candidate_ks.empty() ? std::string("auto") : format_int_list(cfg.filter.centroid_candidate_ks)) +
         "\n";
  out += "mode = " + std::string(to_string(cfg.filter.mode)) + "\n";
  out += "single_k = " + (cfg.filter.single_k ? std::to_string(*cfg.filter.single_k) : std::string("none")) + "\n";
  out += "weighted = " + std::string(cfg.filter.weighted ? "true" : "false") + "\n";
  out += "\n[projection]\n";
  out += "enable = " + std::string(cfg.projection.enable ? "true" : "false") + "\n";
  out += "methods = ";
  for (std::size_t i = 0; i < cfg.projection.methods.size(); ++i) {
    out += (i ? "," : "") + std::string(to_string(cfg.projection.methods[i]));
  }
  out += "\ntsne_perplexity = " + fmt_double(cfg.projection.tsne_perplexity) + "\n";
  out += "tsne_iterations = " + std::to_string(cfg.projection.tsne_iterations) + "\n";
  out += "subsample_cap = " + std::to_string(cfg.projection.subsample_cap) + "\n";
  out += "\n[run]\n";
  out += "seed = " + std::to_string(cfg.seed) + "\n";
  out += "threads = " + std::to_string(cfg.threads) + "\n";
  return out;
}

}  // namespace stylefilter
