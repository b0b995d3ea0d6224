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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lddisc/corpus.hpp"
#include "lddisc/manifest.hpp"
#include "lddisc/matrix.hpp"

namespace lddisc {

// Frames is the default: it tracks amount of audio.
enum class MassBasis { segments, frames };

const char *to_string(MassBasis basis);
MassBasis parse_mass_basis(const std::string &name);

struct DomainDistribution {
  std::vector<double> counts;
  MassBasis basis = MassBasis::frames;
};

// Mass per hidden domain. The frames basis needs segment lengths in `info`.
DomainDistribution domain_distribution(const DomainManifest &manifest, std::size_t num_domains,
                                       MassBasis basis, const SegmentInfoMap *info = nullptr);

struct LabelDomainTable {
  std::vector<std::string> labels;  // first-appearance order in the manifest
  std::size_t num_domains = 0;
  MassBasis basis = MassBasis::frames;
  Matrix cells;  // labels x domains
  std::vector<double> row_totals;
  std::vector<double> col_totals;
  double total = 0.0;
};

// Labels and lengths come from `info`, which must cover every manifest entry.
LabelDomainTable label_domain_table(const DomainManifest &manifest, const SegmentInfoMap &info,
                                    MassBasis basis);

inline constexpr double kDefaultDiscount = 0.03;

// Normalize counts. When some bins are zero, the non-zero bins are scaled by
// (1 - discount) and the discount is shared equally by the zero bins.
std::vector<double> smooth(std::span<const double> counts, double discount = kDefaultDiscount);
std::vector<double> smooth(const DomainDistribution &distribution,
                           double discount = kDefaultDiscount);

// sum_i P(i) ln(P(i) / Q(i)) with 0 ln 0 = 0. Q must be strictly positive.
double kl_divergence(std::span<const double> p, std::span<const double> q);

struct GridRun {
  std::size_t codebook_size = 0;
  std::size_t num_domains = 0;
  const DomainManifest *train = nullptr;
  const DomainManifest *test = nullptr;
  const SegmentInfoMap *train_info = nullptr;  // needed for the frames basis
  const SegmentInfoMap *test_info = nullptr;
};

struct GridCell {
  std::size_t codebook_size = 0;
  std::size_t num_domains = 0;
  std::vector<double> train_distribution;  // smoothed
  std::vector<double> test_distribution;   // smoothed
  double kld = 0.0;
};

// KLD(smooth(train) || smooth(test)) for every (V, K) in the cross product of
// the two lists, in row-major (V outer) order. Throws InputError when a
// configuration has no run.
std::vector<GridCell> consistency_grid(std::span<const std::size_t> codebook_sizes,
                                       std::span<const std::size_t> domain_counts,
                                       std::span<const GridRun> runs, MassBasis basis,
                                       double discount = kDefaultDiscount);

struct TopicMatch {
  std::vector<std::size_t> permutation;  // estimated column for each true column
  double mean_cosine = 0.0;
};

inline constexpr std::size_t kMaxOptimalMatch = 16;

// Pair estimated topic-word columns with true ones maximizing the total
// cosine similarity; optimal for K <= kMaxOptimalMatch, greedy above.
TopicMatch match_topics(const Matrix &estimated, const Matrix &truth);

}  // namespace lddisc
