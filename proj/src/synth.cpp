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

#include "lddisc/synth.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "lddisc/error.hpp"
#include "lddisc/rng.hpp"

namespace lddisc {

namespace {

void check_weights(const std::vector<double> &weights, const std::string &what) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw SpecError(what + ": degenerate mixture (non-positive weight)");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw SpecError(what + ": mixture weights do not sum to 1");
}

std::string padded(std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*zu", width, i);
  return buf;
}

int index_width(std::size_t n) {
  int w = 1;
  for (std::size_t x = n > 0 ? n - 1 : 0; x >= 10; x /= 10) ++w;
  return std::max(w, 4);
}

}  // namespace

void GaussianSynthSpec::validate() const {
  if (dim == 0) throw SpecError("synth: dimension must be at least 1");
  if (sources.empty()) throw SpecError("synth: no sources");
  if (segments_per_source == 0) throw SpecError("synth: segments_per_source must be at least 1");
  if (frames_per_segment == 0) throw SpecError("synth: frames_per_segment must be at least 1");
  std::set<std::string> labels;
  for (const auto &src : sources) {
    if (src.label.empty()) throw SpecError("synth: empty source label");
    if (src.label.find_first_of("\t\n\r") != std::string::npos)
      throw SpecError("synth: source label contains a tab or newline");
    if (!labels.insert(src.label).second) throw SpecError("synth: duplicate source label " + src.label);
    if (src.conditions.empty()) throw SpecError("synth: source " + src.label + " has no conditions");
    std::vector<double> cw;
    for (const auto &cond : src.conditions) {
      cw.push_back(cond.weight);
      if (cond.components.empty()) throw SpecError("synth: source " + src.label + " has an empty condition");
      std::vector<double> w;
      for (const auto &comp : cond.components) {
        w.push_back(comp.weight);
        if (comp.mean.size() != dim) throw SpecError("synth: component mean has wrong dimension");
        for (double m : comp.mean)
          if (!std::isfinite(m)) throw SpecError("synth: non-finite component mean");
        if (!(comp.stddev > 0.0) || !std::isfinite(comp.stddev))
          throw SpecError("synth: component stddev must be positive");
      }
      check_weights(w, "synth: source " + src.label + " components");
    }
    check_weights(cw, "synth: source " + src.label + " conditions");
  }
}

GaussianSynthResult synthesize(const GaussianSynthSpec &spec) {
  spec.validate();
  Rng rng(spec.seed);
  GaussianSynthResult result;
  result.corpus.dim = spec.dim;
  const int width = index_width(spec.segments_per_source);
  for (std::size_t s = 0; s < spec.sources.size(); ++s) {
    const auto &src = spec.sources[s];
    std::vector<double> cond_w;
    for (const auto &c : src.conditions) cond_w.push_back(c.weight);
    for (std::size_t i = 0; i < spec.segments_per_source; ++i) {
      std::size_t ci = rng.categorical(cond_w);
      const auto &cond = src.conditions[ci];
      std::vector<double> comp_w;
      for (const auto &c : cond.components) comp_w.push_back(c.weight);
      FeatureSegment seg;
      seg.id = src.label + "_" + padded(i, width);
      seg.label = src.label;
      seg.dim = spec.dim;
      seg.values.reserve(spec.frames_per_segment * spec.dim);
      for (std::size_t t = 0; t < spec.frames_per_segment; ++t) {
        const auto &comp = cond.components[rng.categorical(comp_w)];
        for (std::size_t d = 0; d < spec.dim; ++d)
          seg.values.push_back(static_cast<float>(comp.mean[d] + comp.stddev * rng.normal()));
      }
      result.corpus.segments.push_back(std::move(seg));
      result.truth.source.push_back(s);
      result.truth.condition.push_back(ci);
    }
  }
  return result;
}

GaussianSynthSpec make_gaussian_spec(const GaussianPreset &p) {
  if (p.num_sources == 0 || p.dim == 0 || p.components_per_condition == 0)
    throw SpecError("synth preset: counts must be at least 1");
  if (p.bimodal_sources > p.num_sources) throw SpecError("synth preset: more bimodal sources than sources");
  if (!p.labels.empty() && p.labels.size() != p.num_sources)
    throw SpecError("synth preset: label count does not match num_sources");
  if (!(p.frame_stddev > 0.0)) throw SpecError("synth preset: frame_stddev must be positive");

  Rng rng(p.seed);
  auto unit_vector = [&] {
    std::vector<double> v(p.dim);
    double norm = 0.0;
    for (;;) {
      norm = 0.0;
      for (double &x : v) {
        x = rng.normal();
        norm += x * x;
      }
      if (norm > 0.0) break;
    }
    norm = std::sqrt(norm);
    for (double &x : v) x /= norm;
    return v;
  };
  auto make_condition = [&](const std::vector<double> &centre) {
    EmitterCondition cond;
    cond.weight = 1.0;
    for (std::size_t c = 0; c < p.components_per_condition; ++c) {
      GaussianComponent comp;
      comp.weight = 1.0 / static_cast<double>(p.components_per_condition);
      comp.stddev = p.frame_stddev;
      comp.mean.resize(p.dim);
      for (std::size_t d = 0; d < p.dim; ++d) comp.mean[d] = centre[d] + p.component_spread * rng.normal();
      cond.components.push_back(std::move(comp));
    }
    return cond;
  };

  GaussianSynthSpec spec;
  spec.dim = p.dim;
  spec.segments_per_source = p.segments_per_source;
  spec.frames_per_segment = p.frames_per_segment;
  spec.seed = p.seed;
  for (std::size_t s = 0; s < p.num_sources; ++s) {
    GaussianSource src;
    src.label = p.labels.empty() ? "S" + std::to_string(s) : p.labels[s];
    auto centre = unit_vector();
    for (double &x : centre) x *= p.source_separation;
    if (s < p.bimodal_sources) {
      auto dir = unit_vector();
      for (double sign : {-0.5, 0.5}) {
        std::vector<double> c(p.dim);
        for (std::size_t d = 0; d < p.dim; ++d) c[d] = centre[d] + sign * p.condition_offset * dir[d];
        auto cond = make_condition(c);
        cond.weight = 0.5;
        src.conditions.push_back(std::move(cond));
      }
    } else {
      src.conditions.push_back(make_condition(centre));
    }
    spec.sources.push_back(std::move(src));
  }
  return spec;
}

void LdaSynthSpec::validate() const {
  if (num_topics == 0 || vocab_size == 0) throw SpecError("lda synth: K and V must be at least 1");
  if (num_segments == 0 || words_per_segment == 0)
    throw SpecError("lda synth: segment and word counts must be at least 1");
  if (!alpha.empty()) {
    if (alpha.size() != num_topics) throw SpecError("lda synth: alpha length must equal K");
    for (double a : alpha)
      if (!(a > 0.0) || !std::isfinite(a)) throw SpecError("lda synth: alpha must be positive");
  }
  if (!beta.empty()) {
    if (beta.rows() != vocab_size || beta.cols() != num_topics)
      throw SpecError("lda synth: beta must be V x K");
    for (std::size_t k = 0; k < num_topics; ++k) {
      double total = 0.0;
      for (std::size_t i = 0; i < vocab_size; ++i) {
        if (!(beta(i, k) >= 0.0)) throw SpecError("lda synth: negative beta entry");
        total += beta(i, k);
      }
      if (std::abs(total - 1.0) > 1e-9) throw SpecError("lda synth: beta column does not sum to 1");
    }
  } else if (!(beta_concentration > 0.0)) {
    throw SpecError("lda synth: beta_concentration must be positive");
  }
}

LdaSynthResult synthesize(const LdaSynthSpec &spec) {
  spec.validate();
  const std::size_t K = spec.num_topics, V = spec.vocab_size;
  Rng rng(spec.seed);
  LdaSynthResult result;
  result.alpha = spec.alpha.empty() ? std::vector<double>(K, 0.1) : spec.alpha;
  if (spec.beta.empty()) {
    result.beta = Matrix(V, K);
    std::vector<double> conc(V, spec.beta_concentration);
    for (std::size_t k = 0; k < K; ++k) {
      auto col = rng.dirichlet(conc);
      for (std::size_t i = 0; i < V; ++i) result.beta(i, k) = col[i];
    }
  } else {
    result.beta = spec.beta;
  }
  std::vector<std::vector<double>> columns(K);
  for (std::size_t k = 0; k < K; ++k) columns[k] = result.beta.column(k);

  result.corpus.vocab_size = V;
  const int width = index_width(spec.num_segments);
  for (std::size_t m = 0; m < spec.num_segments; ++m) {
    auto theta = rng.dirichlet(result.alpha);
    QuantizedSegment seg;
    seg.id = "doc_" + padded(m, width);
    std::size_t top = 0;
    for (std::size_t k = 1; k < K; ++k)
      if (theta[k] > theta[top]) top = k;
    seg.label = "T" + std::to_string(top);
    seg.words.reserve(spec.words_per_segment);
    for (std::size_t n = 0; n < spec.words_per_segment; ++n) {
      std::size_t z = rng.categorical(theta);
      seg.words.push_back(static_cast<std::uint32_t>(rng.categorical(columns[z])));
    }
    result.corpus.segments.push_back(std::move(seg));
    result.theta.push_back(std::move(theta));
  }
  return result;
}

}  // namespace lddisc
