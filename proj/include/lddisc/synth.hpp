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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lddisc/corpus.hpp"
#include "lddisc/matrix.hpp"

namespace lddisc {

// --- Gaussian-emitter regime ------------------------------------------------

// Isotropic Gaussian over feature frames.
struct GaussianComponent {
  double weight = 1.0;
  std::vector<double> mean;
  double stddev = 1.0;
};

// A recording condition: frames of a segment are drawn i.i.d. from this
// mixture. A source with several conditions picks one per segment, which is
// what makes a source "multimodal" at the segment level.
struct EmitterCondition {
  double weight = 1.0;
  std::vector<GaussianComponent> components;
};

struct GaussianSource {
  std::string label;
  std::vector<EmitterCondition> conditions;
};

struct GaussianSynthSpec {
  std::size_t dim = 0;
  std::vector<GaussianSource> sources;
  std::size_t segments_per_source = 1;
  std::size_t frames_per_segment = 1;
  std::uint64_t seed = 0;

  // Throws SpecError on empty counts, dimension mismatches, non-positive
  // weights or mixtures whose weights do not sum to 1 within 1e-9.
  void validate() const;
};

// Ground truth recorded alongside a Gaussian-emitter corpus.
struct GaussianSynthTruth {
  std::vector<std::size_t> source;     // per segment
  std::vector<std::size_t> condition;  // per segment
};

struct GaussianSynthResult {
  FeatureCorpus corpus;
  GaussianSynthTruth truth;
};

// Segments are emitted source by source; ids are "<label>_<index>".
GaussianSynthResult synthesize(const GaussianSynthSpec &spec);

// Procedural construction of a multi-source spec from a handful of knobs, as
// used by the command-line synth. Source centres are drawn on a sphere of
// radius source_separation; each condition carries components_per_condition
// components scattered around its centre with component_spread. The first
// bimodal_sources sources get two equally weighted conditions whose centres
// differ by condition_offset.
struct GaussianPreset {
  std::size_t num_sources = 6;
  std::vector<std::string> labels;  // defaults to S0, S1, ...
  std::size_t dim = 13;
  std::size_t components_per_condition = 6;
  std::size_t bimodal_sources = 1;
  double source_separation = 5.0;
  double condition_offset = 5.0;
  double component_spread = 1.5;
  double frame_stddev = 1.0;
  std::size_t segments_per_source = 110;
  std::size_t frames_per_segment = 200;
  std::uint64_t seed = 0;
};

GaussianSynthSpec make_gaussian_spec(const GaussianPreset &preset);

// --- LDA-parameter regime ---------------------------------------------------

struct LdaSynthSpec {
  std::size_t num_topics = 4;
  std::size_t vocab_size = 100;
  std::vector<double> alpha;     // length num_topics; empty -> 0.1 each
  Matrix beta;                   // vocab_size x num_topics; empty -> sampled
  double beta_concentration = 0.1;  // symmetric Dirichlet for sampled columns
  std::size_t num_segments = 1000;
  std::size_t words_per_segment = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LdaSynthResult {
  QuantizedCorpus corpus;  // labels are "T<argmax theta>"
  std::vector<double> alpha;
  Matrix beta;                             // V x K, columns sum to 1
  std::vector<std::vector<double>> theta;  // per segment topic weights
};

LdaSynthResult synthesize(const LdaSynthSpec &spec);

}  // namespace lddisc
