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

#include "lddisc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "lddisc/error.hpp"
#include "lddisc/rng.hpp"

namespace lddisc {

namespace {

template <typename Segments>
void check_unique_ids(const Segments &segments) {
  std::unordered_set<std::string> seen;
  for (const auto &seg : segments)
    if (!seen.insert(seg.id).second) throw InputError("duplicate segment id \"" + seg.id + "\"");
}

}  // namespace

std::size_t FeatureCorpus::total_frames() const {
  std::size_t n = 0;
  for (const auto &seg : segments) n += seg.num_frames();
  return n;
}

void FeatureCorpus::validate() const {
  if (segments.empty()) throw InputError("corpus has no segments");
  if (dim == 0) throw InputError("feature dimension must be at least 1");
  for (const auto &seg : segments) {
    if (seg.dim != dim)
      throw InputError("segment \"" + seg.id + "\" has dimension " + std::to_string(seg.dim) +
                       ", corpus has " + std::to_string(dim));
    if (seg.values.empty()) throw InputError("segment \"" + seg.id + "\" has no frames");
    if (seg.values.size() % dim != 0)
      throw InputError("segment \"" + seg.id + "\" value count is not a multiple of the dimension");
    for (float v : seg.values)
      if (!std::isfinite(v)) throw InputError("segment \"" + seg.id + "\" has a non-finite value");
  }
  check_unique_ids(segments);
}

std::size_t QuantizedCorpus::total_words() const {
  std::size_t n = 0;
  for (const auto &seg : segments) n += seg.words.size();
  return n;
}

void QuantizedCorpus::validate() const {
  if (segments.empty()) throw InputError("corpus has no segments");
  if (vocab_size == 0) throw InputError("vocabulary size must be at least 1");
  for (const auto &seg : segments) {
    if (seg.words.empty()) throw InputError("segment \"" + seg.id + "\" has no words");
    for (auto w : seg.words)
      if (w >= vocab_size)
        throw InputError("segment \"" + seg.id + "\" has word id " + std::to_string(w) +
                         " >= V=" + std::to_string(vocab_size));
  }
  check_unique_ids(segments);
}

SegmentInfoMap segment_info(const FeatureCorpus &corpus) {
  SegmentInfoMap info;
  for (const auto &seg : corpus.segments) info[seg.id] = {seg.label, seg.num_frames()};
  return info;
}

SegmentInfoMap segment_info(const QuantizedCorpus &corpus) {
  SegmentInfoMap info;
  for (const auto &seg : corpus.segments) info[seg.id] = {seg.label, seg.words.size()};
  return info;
}

std::vector<float> pool_frames(const FeatureCorpus &corpus) {
  std::vector<float> out;
  out.reserve(corpus.total_frames() * corpus.dim);
  for (const auto &seg : corpus.segments) out.insert(out.end(), seg.values.begin(), seg.values.end());
  return out;
}

std::vector<bool> split_mask(std::span<const std::optional<std::string>> labels, double fraction,
                             std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InputError("split fraction must lie in (0, 1)");
  // Strata in order of first appearance.
  std::vector<std::vector<std::size_t>> strata;
  std::map<std::optional<std::string>, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = index.try_emplace(labels[i], strata.size());
    if (inserted) strata.emplace_back();
    strata[it->second].push_back(i);
  }
  Rng rng(seed);
  std::vector<bool> train(labels.size(), false);
  for (auto &members : strata) {
    const std::size_t s = members.size();
    if (s < 2) {
      const auto &label = labels[members.front()];
      throw InputError("split: stratum \"" + label.value_or("<unlabelled>") +
                       "\" has fewer than 2 segments");
    }
    auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(s)));
    k = std::clamp<std::size_t>(k, 1, s - 1);
    for (std::size_t i = s - 1; i > 0; --i) std::swap(members[i], members[rng.uniform_index(i + 1)]);
    for (std::size_t i = 0; i < k; ++i) train[members[i]] = true;
  }
  return train;
}

namespace {

template <typename Corpus>
std::pair<Corpus, Corpus> split_impl(const Corpus &corpus, double fraction, std::uint64_t seed) {
  std::vector<std::optional<std::string>> labels;
  labels.reserve(corpus.segments.size());
  for (const auto &seg : corpus.segments) labels.push_back(seg.label);
  auto mask = split_mask(labels, fraction, seed);
  Corpus train = corpus, test = corpus;
  train.segments.clear();
  test.segments.clear();
  for (std::size_t i = 0; i < mask.size(); ++i)
    (mask[i] ? train : test).segments.push_back(corpus.segments[i]);
  return {std::move(train), std::move(test)};
}

}  // namespace

std::pair<FeatureCorpus, FeatureCorpus> split(const FeatureCorpus &corpus, double fraction,
                                              std::uint64_t seed) {
  return split_impl(corpus, fraction, seed);
}

std::pair<QuantizedCorpus, QuantizedCorpus> split(const QuantizedCorpus &corpus, double fraction,
                                                  std::uint64_t seed) {
  return split_impl(corpus, fraction, seed);
}

}  // namespace lddisc
