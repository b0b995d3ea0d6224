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
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lddisc {

// A segment of continuous feature frames, stored row-major as float32 so the
// in-memory values are exactly what the feature file holds.
struct FeatureSegment {
  std::string id;
  std::optional<std::string> label;
  std::size_t dim = 0;
  std::vector<float> values;  // num_frames() x dim

  std::size_t num_frames() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const float> frame(std::size_t t) const {
    return {values.data() + t * dim, dim};
  }
  friend bool operator==(const FeatureSegment &, const FeatureSegment &) = default;
};

// A segment of discrete acoustic words (the LDA "document").
struct QuantizedSegment {
  std::string id;
  std::optional<std::string> label;
  std::vector<std::uint32_t> words;

  friend bool operator==(const QuantizedSegment &, const QuantizedSegment &) = default;
};

struct FeatureCorpus {
  std::size_t dim = 0;
  std::vector<FeatureSegment> segments;

  std::size_t size() const { return segments.size(); }
  std::size_t total_frames() const;
  // Throws InputError unless M >= 1, ids are unique, every segment has
  // T >= 1 frames of dimension dim >= 1 and all values are finite.
  void validate() const;
  friend bool operator==(const FeatureCorpus &, const FeatureCorpus &) = default;
};

struct QuantizedCorpus {
  std::size_t vocab_size = 0;
  std::vector<QuantizedSegment> segments;

  std::size_t size() const { return segments.size(); }
  std::size_t total_words() const;
  // Throws InputError unless M >= 1, ids are unique, every segment is
  // non-empty and every word id is below vocab_size.
  void validate() const;
  friend bool operator==(const QuantizedCorpus &, const QuantizedCorpus &) = default;
};

// Per-segment bookkeeping used by the metrics: label and length in frames.
struct SegmentInfo {
  std::optional<std::string> label;
  std::size_t length = 0;
};
using SegmentInfoMap = std::unordered_map<std::string, SegmentInfo>;

SegmentInfoMap segment_info(const FeatureCorpus &corpus);
SegmentInfoMap segment_info(const QuantizedCorpus &corpus);

// Concatenate every frame of the corpus into one row-major buffer.
std::vector<float> pool_frames(const FeatureCorpus &corpus);

// Stratified random split. Segments are grouped by label (unlabelled segments
// form one stratum); each stratum of size s contributes round(fraction * s)
// segments to train, clamped to [1, s - 1]. Both outputs keep corpus order.
// Throws InputError when fraction is outside (0, 1) or a stratum has fewer
// than two segments.
std::pair<FeatureCorpus, FeatureCorpus> split(const FeatureCorpus &corpus,
                                              double fraction, std::uint64_t seed);
std::pair<QuantizedCorpus, QuantizedCorpus> split(const QuantizedCorpus &corpus,
                                                  double fraction, std::uint64_t seed);

// Indices selected for the train side of a split over the given labels.
std::vector<bool> split_mask(std::span<const std::optional<std::string>> labels,
                             double fraction, std::uint64_t seed);

}  // namespace lddisc
