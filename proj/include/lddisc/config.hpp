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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lddisc/codebook.hpp"
#include "lddisc/lda.hpp"
#include "lddisc/metrics.hpp"
#include "lddisc/synth.hpp"

namespace lddisc {

struct SynthConfig {
  std::string regime = "gaussian";  // "gaussian" or "lda"
  GaussianPreset gaussian;
  std::size_t lda_num_topics = 4;
  std::size_t lda_vocab_size = 100;
  double lda_alpha = 0.1;
  double lda_beta_concentration = 0.1;
  std::size_t lda_num_segments = 1200;
  std::size_t lda_words_per_segment = 100;
  // 0 disables the train/test split. The default turns 110 segments per
  // source into 100 train + 10 test.
  double train_fraction = 10.0 / 11.0;
};

struct ReportConfig {
  MassBasis basis = MassBasis::frames;
  double discount = kDefaultDiscount;
};

struct SweepConfig {
  std::vector<std::size_t> codebook_sizes{128, 512, 2048, 8192};
  std::vector<std::size_t> domain_counts{4, 8, 16, 32, 64};
};

// Every tunable of a run. Stored as "key = value" lines; '#' starts a comment.
// The single `seed` key feeds every stochastic step.
struct RunConfig {
  std::uint64_t seed = 1;
  SynthConfig synth;
  VqTrainConfig codebook;
  LdaTrainConfig lda;
  ReportConfig report;
  SweepConfig sweep;

  // Throws SpecError for unknown keys or unparsable values.
  void set(const std::string &key, const std::string &value);
  // All keys in a fixed order with their current values.
  std::vector<std::pair<std::string, std::string>> entries() const;
  std::string to_text() const;
  // JSON object mirroring entries(), used as the echo embedded in outputs.
  std::string to_json() const;

  // Copies of the module configs with the run seed applied.
  VqTrainConfig codebook_config() const;
  LdaTrainConfig lda_config() const;
  GaussianPreset gaussian_preset() const;
  LdaSynthSpec lda_synth_spec() const;

  static RunConfig parse(std::istream &in);
  static RunConfig load(const std::filesystem::path &path);
};

}  // namespace lddisc
