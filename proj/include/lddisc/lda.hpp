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
#include <vector>

#include "lddisc/corpus.hpp"
#include "lddisc/matrix.hpp"

namespace lddisc {

// Topic model over a vocabulary of acoustic words. log_beta(i, j) is
// log p(word i | domain j); every column is a normalized log distribution.
struct LdaModel {
  std::size_t num_topics = 0;
  std::size_t vocab_size = 0;
  std::vector<double> alpha;
  Matrix log_beta;  // vocab_size x num_topics

  // Throws InputError when shapes disagree, alpha is not positive, an entry is
  // non-finite or a column does not sum to 1 within 1e-9.
  void validate() const;
  friend bool operator==(const LdaModel &, const LdaModel &) = default;
};

// Variational posterior of one segment: q(theta | gamma) prod_n q(z_n | phi_n).
struct SegmentPosterior {
  std::vector<double> gamma;
  Matrix phi;  // N x K; empty when not requested
  double elbo = 0.0;
  std::size_t iterations = 0;
};

enum class AlphaMode { fixed, estimate };

struct LdaTrainConfig {
  std::size_t num_topics = 8;
  std::size_t max_em_iters = 100;
  double em_converge_tol = 1e-5;
  std::size_t estep_max_iters = 100;
  double estep_converge_tol = 1e-4;
  AlphaMode alpha_mode = AlphaMode::estimate;
  double alpha = 1.0;  // fixed value, or the starting point of estimation
  double beta_smoothing = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EStepOptions {
  std::size_t max_iters = 100;
  double converge_tol = 1e-4;
  bool keep_phi = true;
  // When set, the bound after each iteration is appended here.
  std::vector<double> *elbo_trace = nullptr;
};

// Coordinate ascent on (gamma, phi) for a single segment.
SegmentPosterior e_step_segment(const QuantizedSegment &segment, const LdaModel &model,
                                const EStepOptions &options = {});

struct LdaTrainResult {
  LdaModel model;
  std::vector<double> elbo_trace;   // corpus bound after each E-step
  std::vector<double> alpha_trace;  // alpha[0] used by each E-step
  std::vector<std::vector<double>> gammas;  // final training posteriors
  std::size_t iterations = 0;
  bool converged = false;
};

// Variational EM. The corpus vocabulary size fixes the model's V.
LdaTrainResult train(const QuantizedCorpus &corpus, const LdaTrainConfig &config);

std::vector<SegmentPosterior> infer(const QuantizedCorpus &corpus, const LdaModel &model,
                                    const EStepOptions &options = {});

// argmax_j gamma_j, lowest index on ties.
std::size_t assign_domain(const SegmentPosterior &posterior);
std::size_t assign_domain(const std::vector<double> &gamma);

double corpus_elbo(const QuantizedCorpus &corpus, const LdaModel &model,
                   const std::vector<SegmentPosterior> &posteriors);

// Variational bound for given (gamma, phi); phi must be N x K.
double segment_elbo(const QuantizedSegment &segment, const LdaModel &model,
                    const std::vector<double> &gamma, const Matrix &phi);

// log p(w | alpha, beta) by summing over all K^N topic assignments.
// Throws InputError when K^N exceeds kMaxEnumeration.
inline constexpr std::uint64_t kMaxEnumeration = 1000000;
double exact_marginal_log_likelihood(const QuantizedSegment &segment, const LdaModel &model);

// "LDAM" | version u32 | K u32 | V u32 | K float64 alpha | V*K float64 log
// beta (row-major by word) | metadata_len u32 | metadata (UTF-8 JSON).
inline constexpr std::uint32_t kModelFormatVersion = 1;

void write_model(const LdaModel &model, std::ostream &out, const std::string &metadata_json = "{}");
void write_model(const LdaModel &model, const std::filesystem::path &path,
                 const std::string &metadata_json = "{}");
LdaModel read_model(std::istream &in, std::string *metadata_json = nullptr);
LdaModel read_model(const std::filesystem::path &path, std::string *metadata_json = nullptr);

// V x K matrix of probabilities exp(log_beta).
Matrix topic_word_probabilities(const LdaModel &model);

}  // namespace lddisc
