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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lddisc/corpus.hpp"

namespace lddisc {

struct VqTrainConfig {
  std::size_t target_size = 2048;  // power of two
  std::size_t em_iters_per_level = 20;
  double split_epsilon = 0.05;
  double convergence_tol = 1e-5;
  bool normalize = true;  // per-dimension z-normalization before training
  std::uint64_t seed = 0;

  void validate() const;
};

// Acoustic-word codebook: V float32 means in the (optionally normalized)
// feature space. A frame x is mapped to z = (x - offset) / scale before the
// nearest-mean search.
class Codebook {
 public:
  Codebook() = default;
  Codebook(std::size_t dim, std::vector<float> means, std::vector<double> offset,
           std::vector<double> scale, bool normalized, double training_distortion);

  std::size_t size() const { return dim_ == 0 ? 0 : means_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool normalized() const { return normalized_; }
  double training_distortion() const { return training_distortion_; }
  std::span<const float> mean(std::size_t j) const { return {means_.data() + j * dim_, dim_}; }
  const std::vector<float> &means() const { return means_; }
  const std::vector<double> &offset() const { return offset_; }
  const std::vector<double> &scale() const { return scale_; }

  // z = (x - offset) / scale, computed in double.
  void normalize(std::span<const float> frame, std::span<double> z) const;

  // Nearest mean to an already-normalized vector: (index, squared distance).
  // Exact ties go to the lowest index.
  std::pair<std::uint32_t, double> nearest(std::span<const double> z) const;

  friend bool operator==(const Codebook &, const Codebook &) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<float> means_;
  std::vector<double> offset_;
  std::vector<double> scale_;
  bool normalized_ = false;
  double training_distortion_ = 0.0;
};

// Distortion recorded after every EM iteration of one mix-up level.
struct VqLevelTrace {
  std::size_t size = 0;
  std::vector<double> distortion;
  std::size_t reseeded = 0;  // empty clusters repaired at this level
};

struct VqTrainResult {
  Codebook codebook;
  std::vector<std::uint32_t> assignments;  // final hard assignment per frame
  std::vector<VqLevelTrace> levels;
};

// Mix-up training of an identity-covariance GMM with hard assignments
// (LBG). `frames` is row-major with `dim` columns.
VqTrainResult train_codebook(std::span<const float> frames, std::size_t dim,
                             const VqTrainConfig &config);
VqTrainResult train_codebook(const FeatureCorpus &corpus, const VqTrainConfig &config);

std::uint32_t quantize_frame(std::span<const float> frame, const Codebook &codebook);
QuantizedCorpus quantize_corpus(const FeatureCorpus &corpus, const Codebook &codebook);
// Mean squared distance from each frame to its nearest mean, in the
// codebook's (normalized) space.
double distortion(const FeatureCorpus &corpus, const Codebook &codebook);

// "LDCB" | version u32 | V u32 | n u32 | V*n float32 means | float64
// distortion | normalized u32 | n float64 offset | n float64 scale |
// metadata_len u32 | metadata (UTF-8 JSON).
inline constexpr std::uint32_t kCodebookFormatVersion = 1;

void write_codebook(const Codebook &codebook, std::ostream &out,
                    const std::string &metadata_json = "{}");
void write_codebook(const Codebook &codebook, const std::filesystem::path &path,
                    const std::string &metadata_json = "{}");
Codebook read_codebook(std::istream &in, std::string *metadata_json = nullptr);
Codebook read_codebook(const std::filesystem::path &path, std::string *metadata_json = nullptr);
// One mean per line, space separated.
void write_codebook_text(const Codebook &codebook, std::ostream &out);

}  // namespace lddisc
