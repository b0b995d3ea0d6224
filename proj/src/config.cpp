// Copyright 2026  The lddisc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "lddisc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "lddisc/error.hpp"

namespace lddisc {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

template <typename T>
T parse_number(const std::string &key, const std::string &value) {
  T out{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || p != value.data() + value.size())
    throw SpecError("config: bad value \"" + value + "\" for " + key);
  return out;
}

bool parse_bool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw SpecError("config: bad boolean \"" + value + "\" for " + key);
}

std::vector<std::string> split_list(const std::string &value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(value);
  while (std::getline(is, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string join(const std::vector<std::string> &items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::string join_sizes(const std::vector<std::size_t> &items) {
  std::vector<std::string> s;
  for (auto v : items) s.push_back(std::to_string(v));
  return join(s);
}

std::vector<std::size_t> parse_sizes(const std::string &key, const std::string &value) {
  std::vector<std::size_t> out;
  for (const auto &item : split_list(value)) out.push_back(parse_number<std::size_t>(key, item));
  if (out.empty()) throw SpecError("config: empty list for " + key);
  return out;
}

struct Field {
  const char *key;
  std::function<std::string()> get;
  std::function<void(const std::string &)> set;
};

template <typename T>
Field number_field(const char *key, T &ref) {
  return {key,
          [&ref] {
            if constexpr (std::is_floating_point_v<T>) return format_double(ref);
            else return std::to_string(ref);
          },
          [&ref, key](const std::string &v) { ref = parse_number<T>(key, v); }};
}

std::vector<Field> fields(RunConfig &c) {
  auto &g = c.synth.gaussian;
  return {
      number_field("seed", c.seed),
      {"synth.regime", [&c] { return c.synth.regime; },
       [&c](const std::string &v) {
         if (v != "gaussian" && v != "lda") throw SpecError("config: synth.regime must be gaussian or lda");
         c.synth.regime = v;
       }},
      number_field("synth.num_sources", g.num_sources),
      {"synth.labels", [&g] { return join(g.labels); },
       [&g](const std::string &v) { g.labels = split_list(v); }},
      number_field("synth.dim", g.dim),
      number_field("synth.components_per_condition", g.components_per_condition),
      number_field("synth.bimodal_sources", g.bimodal_sources),
      number_field("synth.source_separation", g.source_separation),
      number_field("synth.condition_offset", g.condition_offset),
      number_field("synth.component_spread", g.component_spread),
      number_field("synth.frame_stddev", g.frame_stddev),
      number_field("synth.segments_per_source", g.segments_per_source),
      number_field("synth.frames_per_segment", g.frames_per_segment),
      number_field("synth.lda.num_topics", c.synth.lda_num_topics),
      number_field("synth.lda.vocab_size", c.synth.lda_vocab_size),
      number_field("synth.lda.alpha", c.synth.lda_alpha),
      number_field("synth.lda.beta_concentration", c.synth.lda_beta_concentration),
      number_field("synth.lda.num_segments", c.synth.lda_num_segments),
      number_field("synth.lda.words_per_segment", c.synth.lda_words_per_segment),
      number_field("synth.train_fraction", c.synth.train_fraction),
      number_field("codebook.size", c.codebook.target_size),
      number_field("codebook.em_iters_per_level", c.codebook.em_iters_per_level),
      number_field("codebook.split_epsilon", c.codebook.split_epsilon),
      number_field("codebook.convergence_tol", c.codebook.convergence_tol),
      {"codebook.normalize", [&c] { return std::string(c.codebook.normalize ? "true" : "false"); },
       [&c](const std::string &v) { c.codebook.normalize = parse_bool("codebook.normalize", v); }},
      number_field("lda.num_domains", c.lda.num_topics),
      number_field("lda.max_em_iters", c.lda.max_em_iters),
      number_field("lda.em_converge_tol", c.lda.em_converge_tol),
      number_field("lda.estep_max_iters", c.lda.estep_max_iters),
      number_field("lda.estep_converge_tol", c.lda.estep_converge_tol),
      {"lda.alpha_mode",
       [&c] { return std::string(c.lda.alpha_mode == AlphaMode::estimate ? "estimate" : "fixed"); },
       [&c](const std::string &v) {
         if (v == "estimate") c.lda.alpha_mode = AlphaMode::estimate;
         else if (v == "fixed") c.lda.alpha_mode = AlphaMode::fixed;
         else throw SpecError("config: lda.alpha_mode must be estimate or fixed");
       }},
      number_field("lda.alpha", c.lda.alpha),
      number_field("lda.beta_smoothing", c.lda.beta_smoothing),
      {"report.basis", [&c] { return std::string(to_string(c.report.basis)); },
       [&c](const std::string &v) {
         try {
           c.report.basis = parse_mass_basis(v);
         } catch (const InputError &e) {
           throw SpecError(std::string("config: ") + e.what());
         }
       }},
      number_field("report.discount", c.report.discount),
      {"sweep.codebook_sizes", [&c] { return join_sizes(c.sweep.codebook_sizes); },
       [&c](const std::string &v) { c.sweep.codebook_sizes = parse_sizes("sweep.codebook_sizes", v); }},
      {"sweep.num_domains", [&c] { return join_sizes(c.sweep.domain_counts); },
       [&c](const std::string &v) { c.sweep.domain_counts = parse_sizes("sweep.num_domains", v); }},
  };
}

}  // namespace

void RunConfig::set(const std::string &key, const std::string &value) {
  for (auto &f : fields(*this))
    if (key == f.key) {
      f.set(value);
      return;
    }
  throw SpecError("config: unknown key \"" + key + "\"");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto &f : fields(const_cast<RunConfig &>(*this))) out.emplace_back(f.key, f.get());
  return out;
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto &[k, v] : entries()) out += k + " = " + v + "\n";
  return out;
}

std::string RunConfig::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto &[k, v] : entries()) j[k] = v;
  return j.dump();
}

VqTrainConfig RunConfig::codebook_config() const {
  VqTrainConfig c = codebook;
  c.seed = seed;
  return c;
}

LdaTrainConfig RunConfig::lda_config() const {
  LdaTrainConfig c = lda;
  c.seed = seed;
  return c;
}

GaussianPreset RunConfig::gaussian_preset() const {
  GaussianPreset p = synth.gaussian;
  p.seed = seed;
  return p;
}

LdaSynthSpec RunConfig::lda_synth_spec() const {
  LdaSynthSpec s;
  s.num_topics = synth.lda_num_topics;
  s.vocab_size = synth.lda_vocab_size;
  s.alpha.assign(s.num_topics, synth.lda_alpha);
  s.beta_concentration = synth.lda_beta_concentration;
  s.num_segments = synth.lda_num_segments;
  s.words_per_segment = synth.lda_words_per_segment;
  s.seed = seed;
  return s;
}

RunConfig RunConfig::parse(std::istream &in) {
  RunConfig config;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw SpecError("config line " + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      auto l = s.find_first_not_of(" \t\r");
      auto r = s.find_last_not_of(" \t\r");
      return l == std::string::npos ? std::string() : s.substr(l, r - l + 1);
    };
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

RunConfig RunConfig::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse(in);
}

}  // namespace lddisc
