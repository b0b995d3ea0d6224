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

#include "lddisc/lda.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "binio.hpp"
#include "lddisc/error.hpp"
#include "lddisc/rng.hpp"
#include "lddisc/special.hpp"

namespace lddisc {

namespace {

constexpr char kModelMagic[5] = "LDAM";
// Floor for log beta when smoothing is disabled and a word is unseen.
constexpr double kLogFloor = -708.0;

// Bag-of-words view of a segment. Word types keep first-occurrence order so
// relabelling the vocabulary does not change the order of any reduction.
struct Bag {
  std::vector<std::uint32_t> types;
  std::vector<double> counts;
  std::vector<std::size_t> position;  // per token: index into types
  double length = 0.0;
};

Bag make_bag(const QuantizedSegment &segment, std::size_t vocab_size) {
  Bag bag;
  std::unordered_map<std::uint32_t, std::size_t> index;
  bag.position.reserve(segment.words.size());
  for (auto w : segment.words) {
    if (w >= vocab_size)
      throw InputError("segment \"" + segment.id + "\": word id " + std::to_string(w) +
                       " is outside the model vocabulary (V=" + std::to_string(vocab_size) + ")");
    auto [it, inserted] = index.try_emplace(w, bag.types.size());
    if (inserted) {
      bag.types.push_back(w);
      bag.counts.push_back(0.0);
    }
    bag.counts[it->second] += 1.0;
    bag.position.push_back(it->second);
  }
  bag.length = static_cast<double>(segment.words.size());
  return bag;
}

// Terms of the bound that depend only on alpha.
double alpha_normalizer(const std::vector<double> &alpha) {
  double sum = 0.0, lg = 0.0;
  for (double a : alpha) {
    sum += a;
    lg += log_gamma(a);
  }
  return log_gamma(sum) - lg;
}

// Bound for a bag given gamma and per-type log phi (types x K).
double bag_elbo(const Bag &bag, const LdaModel &model, const std::vector<double> &gamma,
                const Matrix &log_phi) {
  const std::size_t K = model.num_topics;
  double gamma_sum = 0.0;
  for (double g : gamma) gamma_sum += g;
  const double dig_sum = digamma(gamma_sum);
  std::vector<double> e_log_theta(K);
  for (std::size_t k = 0; k < K; ++k) e_log_theta[k] = digamma(gamma[k]) - dig_sum;

  double elbo = alpha_normalizer(model.alpha) - log_gamma(gamma_sum);
  for (std::size_t k = 0; k < K; ++k) {
    elbo += (model.alpha[k] - 1.0) * e_log_theta[k];
    elbo += log_gamma(gamma[k]) - (gamma[k] - 1.0) * e_log_theta[k];
  }
  for (std::size_t u = 0; u < bag.types.size(); ++u) {
    auto beta_row = model.log_beta.row(bag.types[u]);
    auto lp = log_phi.row(u);
    double term = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      double phi = std::exp(lp[k]);
      if (phi == 0.0) continue;
      term += phi * (e_log_theta[k] + beta_row[k] - lp[k]);
    }
    elbo += bag.counts[u] * term;
  }
  return elbo;
}

struct EStepOutcome {
  double elbo = 0.0;
  std::size_t iterations = 0;
};

// Coordinate ascent from the given gamma: each iteration sets phi optimal for
// the current gamma, then gamma optimal for that phi.
EStepOutcome run_e_step(const Bag &bag, const LdaModel &model, std::vector<double> &gamma,
                        Matrix &log_phi, std::size_t max_iters, double tol,
                        std::vector<double> *trace) {
  const std::size_t K = model.num_topics;
  const std::size_t U = bag.types.size();
  log_phi = Matrix(U, K, -std::log(static_cast<double>(K)));
  if (trace) trace->push_back(bag_elbo(bag, model, gamma, log_phi));

  std::vector<double> dig(K), next(K), lp(K);
  EStepOutcome out;
  for (std::size_t it = 1; it <= max_iters; ++it) {
    for (std::size_t k = 0; k < K; ++k) dig[k] = digamma(gamma[k]);
    std::copy(model.alpha.begin(), model.alpha.end(), next.begin());
    for (std::size_t u = 0; u < U; ++u) {
      auto beta_row = model.log_beta.row(bag.types[u]);
      for (std::size_t k = 0; k < K; ++k) lp[k] = dig[k] + beta_row[k];
      const double norm = log_sum_exp(lp);
      auto row = log_phi.row(u);
      for (std::size_t k = 0; k < K; ++k) {
        row[k] = lp[k] - norm;
        next[k] += bag.counts[u] * std::exp(row[k]);
      }
    }
    double delta = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (!std::isfinite(next[k]) || !(next[k] > 0.0))
        throw NumericalError("E-step: non-finite or non-positive gamma at iteration " + std::to_string(it));
      delta += std::abs(next[k] - gamma[k]);
      gamma[k] = next[k];
    }
    delta /= static_cast<double>(K);
    out.iterations = it;
    if (trace) trace->push_back(bag_elbo(bag, model, gamma, log_phi));
    if (delta < tol) break;
  }
  out.elbo = bag_elbo(bag, model, gamma, log_phi);
  if (!std::isfinite(out.elbo))
    throw NumericalError("E-step: non-finite bound after iteration " + std::to_string(out.iterations));
  return out;
}

std::vector<double> initial_gamma(const LdaModel &model, double length) {
  std::vector<double> gamma(model.alpha);
  for (double &g : gamma) g += length / static_cast<double>(model.num_topics);
  return gamma;
}

Matrix expand_phi(const Bag &bag, const Matrix &log_phi) {
  Matrix phi(bag.position.size(), log_phi.cols());
  for (std::size_t n = 0; n < bag.position.size(); ++n) {
    auto src = log_phi.row(bag.position[n]);
    auto dst = phi.row(n);
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = std::exp(src[k]);
  }
  return phi;
}

// Symmetric alpha maximizing M (lgamma(K a) - K lgamma(a)) + (a - 1) ss.
// The objective is concave in a; Newton steps are halved until they improve.
double optimize_symmetric_alpha(double a, std::size_t K, std::size_t M, double ss) {
  const double k = static_cast<double>(K), m = static_cast<double>(M);
  auto f = [&](double x) { return m * (log_gamma(k * x) - k * log_gamma(x)) + (x - 1.0) * ss; };
  double fa = f(a);
  for (int it = 0; it < 100; ++it) {
    double g = m * (k * digamma(k * a) - k * digamma(a)) + ss;
    double h = m * (k * k * trigamma(k * a) - k * trigamma(a));
    if (!(h < 0.0) || !std::isfinite(g)) break;
    double step = -g / h;
    double t = 1.0;
    double next = a + step, fnext = 0.0;
    bool improved = false;
    for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
      next = a + t * step;
      if (next > 1e-8) {
        fnext = f(next);
        if (fnext >= fa) {
          improved = true;
          break;
        }
      }
    }
    if (!improved) break;
    bool done = std::abs(next - a) <= 1e-12 * a;
    a = next;
    fa = fnext;
    if (done) break;
  }
  return a;
}

}  // namespace

void LdaModel::validate() const {
  if (num_topics == 0) throw InputError("model: K must be at least 1");
  if (vocab_size == 0) throw InputError("model: V must be at least 1");
  if (alpha.size() != num_topics) throw InputError("model: alpha length differs from K");
  for (double a : alpha)
    if (!(a > 0.0) || !std::isfinite(a)) throw InputError("model: alpha entries must be positive");
  if (log_beta.rows() != vocab_size || log_beta.cols() != num_topics)
    throw InputError("model: log beta is not V x K");
  for (std::size_t k = 0; k < num_topics; ++k) {
    double total = 0.0;
    for (std::size_t i = 0; i < vocab_size; ++i) {
      double lb = log_beta(i, k);
      if (!std::isfinite(lb)) throw InputError("model: non-finite log beta");
      total += std::exp(lb);
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw InputError("model: topic " + std::to_string(k) + " does not sum to 1");
  }
}

void LdaTrainConfig::validate() const {
  if (num_topics == 0) throw InputError("lda: K must be at least 1");
  if (max_em_iters == 0 || estep_max_iters == 0) throw InputError("lda: iteration caps must be at least 1");
  if (!(em_converge_tol > 0.0) || !(estep_converge_tol > 0.0))
    throw InputError("lda: tolerances must be positive");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("lda: alpha must be positive");
  if (!(beta_smoothing >= 0.0) || !std::isfinite(beta_smoothing))
    throw InputError("lda: beta smoothing must be non-negative");
}

SegmentPosterior e_step_segment(const QuantizedSegment &segment, const LdaModel &model,
                                const EStepOptions &options) {
  if (segment.words.empty()) throw InputError("segment \"" + segment.id + "\" has no words");
  if (options.max_iters == 0 || !(options.converge_tol > 0.0))
    throw InputError("E-step options must have positive caps and tolerance");
  Bag bag = make_bag(segment, model.vocab_size);
  SegmentPosterior post;
  post.gamma = initial_gamma(model, bag.length);
  Matrix log_phi;
  auto out = run_e_step(bag, model, post.gamma, log_phi, options.max_iters, options.converge_tol,
                        options.elbo_trace);
  post.elbo = out.elbo;
  post.iterations = out.iterations;
  if (options.keep_phi) post.phi = expand_phi(bag, log_phi);
  return post;
}

LdaTrainResult train(const QuantizedCorpus &corpus, const LdaTrainConfig &config) {
  config.validate();
  if (corpus.segments.empty()) throw InputError("lda train: empty corpus");
  corpus.validate();
  const std::size_t K = config.num_topics, V = corpus.vocab_size, M = corpus.segments.size();

  LdaTrainResult result;
  LdaModel &model = result.model;
  model.num_topics = K;
  model.vocab_size = V;
  model.alpha.assign(K, config.alpha);
  model.log_beta = Matrix(V, K);
  {
    // Random start: 1/V plus U(0,1) pseudo-counts per entry.
    Rng rng(config.seed);
    const double base = 1.0 / static_cast<double>(V), jitter = 1.0;
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<double> col(V);
      double total = 0.0;
      for (std::size_t i = 0; i < V; ++i) {
        col[i] = base + jitter * rng.uniform();
        total += col[i];
      }
      for (std::size_t i = 0; i < V; ++i) model.log_beta(i, k) = std::log(col[i] / total);
    }
  }

  std::vector<Bag> bags;
  bags.reserve(M);
  for (const auto &seg : corpus.segments) bags.push_back(make_bag(seg, V));

  std::vector<std::vector<double>> gammas(M);
  std::vector<Matrix> log_phis(M);
  std::vector<double> elbos(M);
  double prev = 0.0;
  for (std::size_t iter = 0; iter < config.max_em_iters; ++iter) {
    // E-step, warm-started from the previous posteriors so the bound cannot
    // drop between EM iterations.
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(M); ++m) {
      if (iter == 0) gammas[m] = initial_gamma(model, bags[m].length);
      elbos[m] = run_e_step(bags[m], model, gammas[m], log_phis[m], config.estep_max_iters,
                            config.estep_converge_tol, nullptr)
                     .elbo;
    }
    double total = 0.0;
    for (double e : elbos) total += e;
    if (!std::isfinite(total))
      throw NumericalError("lda train: non-finite bound at EM iteration " + std::to_string(iter + 1));
    result.elbo_trace.push_back(total);
    result.alpha_trace.push_back(model.alpha[0]);
    result.iterations = iter + 1;
    if (iter > 0 && (total - prev) < config.em_converge_tol * std::abs(prev)) {
      result.converged = true;
      break;
    }
    prev = total;
    if (iter + 1 == config.max_em_iters) break;

    // M-step: beta from expected counts, reduced in segment order.
    Matrix counts(V, K, 0.0);
    double alpha_ss = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      const Bag &bag = bags[m];
      for (std::size_t u = 0; u < bag.types.size(); ++u) {
        auto dst = counts.row(bag.types[u]);
        auto lp = log_phis[m].row(u);
        for (std::size_t k = 0; k < K; ++k) dst[k] += bag.counts[u] * std::exp(lp[k]);
      }
      double gsum = 0.0;
      for (double g : gammas[m]) gsum += g;
      const double dsum = digamma(gsum);
      for (double g : gammas[m]) alpha_ss += digamma(g) - dsum;
    }
    const double eta = config.beta_smoothing;
    for (std::size_t k = 0; k < K; ++k) {
      double total_k = 0.0;
      for (std::size_t i = 0; i < V; ++i) total_k += counts(i, k) + eta;
      const double log_total = std::log(total_k);
      for (std::size_t i = 0; i < V; ++i) {
        double c = counts(i, k) + eta;
        model.log_beta(i, k) = c > 0.0 ? std::max(std::log(c) - log_total, kLogFloor) : kLogFloor;
      }
    }
    if (config.alpha_mode == AlphaMode::estimate && K > 1) {
      double a = optimize_symmetric_alpha(model.alpha[0], K, M, alpha_ss);
      model.alpha.assign(K, a);
    }
  }
  result.gammas = std::move(gammas);
  return result;
}

std::vector<SegmentPosterior> infer(const QuantizedCorpus &corpus, const LdaModel &model,
                                    const EStepOptions &options) {
  std::vector<SegmentPosterior> out(corpus.segments.size());
  EStepOptions opts = options;
  opts.elbo_trace = nullptr;
  // Validate up front so errors are raised outside the parallel region.
  for (const auto &seg : corpus.segments) make_bag(seg, model.vocab_size);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(out.size()); ++m)
    out[m] = e_step_segment(corpus.segments[m], model, opts);
  return out;
}

std::size_t assign_domain(const std::vector<double> &gamma) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < gamma.size(); ++k)
    if (gamma[k] > gamma[best]) best = k;
  return best;
}

std::size_t assign_domain(const SegmentPosterior &posterior) { return assign_domain(posterior.gamma); }

double segment_elbo(const QuantizedSegment &segment, const LdaModel &model,
                    const std::vector<double> &gamma, const Matrix &phi) {
  const std::size_t K = model.num_topics;
  if (gamma.size() != K) throw InputError("segment_elbo: gamma length differs from K");
  if (phi.rows() != segment.words.size() || phi.cols() != K)
    throw InputError("segment_elbo: phi must be N x K");
  double gamma_sum = 0.0;
  for (double g : gamma) gamma_sum += g;
  const double dig_sum = digamma(gamma_sum);
  std::vector<double> e_log_theta(K);
  for (std::size_t k = 0; k < K; ++k) e_log_theta[k] = digamma(gamma[k]) - dig_sum;
  double elbo = alpha_normalizer(model.alpha) - log_gamma(gamma_sum);
  for (std::size_t k = 0; k < K; ++k)
    elbo += (model.alpha[k] - gamma[k]) * e_log_theta[k] + log_gamma(gamma[k]);
  for (std::size_t n = 0; n < segment.words.size(); ++n) {
    auto w = segment.words[n];
    if (w >= model.vocab_size) throw InputError("segment_elbo: word id outside the vocabulary");
    for (std::size_t k = 0; k < K; ++k) {
      double p = phi(n, k);
      if (p > 0.0) elbo += p * (e_log_theta[k] + model.log_beta(w, k) - std::log(p));
    }
  }
  return elbo;
}

double corpus_elbo(const QuantizedCorpus &corpus, const LdaModel &model,
                   const std::vector<SegmentPosterior> &posteriors) {
  if (posteriors.size() != corpus.segments.size())
    throw InputError("corpus_elbo: " + std::to_string(posteriors.size()) + " posteriors for " +
                     std::to_string(corpus.segments.size()) + " segments");
  double total = 0.0;
  for (std::size_t m = 0; m < posteriors.size(); ++m) {
    const auto &post = posteriors[m];
    if (post.gamma.size() != model.num_topics) throw InputError("corpus_elbo: gamma length differs from K");
    if (post.phi.empty()) {
      total += post.elbo;
    } else {
      total += segment_elbo(corpus.segments[m], model, post.gamma, post.phi);
    }
  }
  return total;
}

double exact_marginal_log_likelihood(const QuantizedSegment &segment, const LdaModel &model) {
  const std::size_t K = model.num_topics, N = segment.words.size();
  if (N == 0) throw InputError("exact likelihood: empty segment");
  if (model.alpha.size() != K || model.log_beta.cols() != K) throw InputError("exact likelihood: bad model");
  std::uint64_t configurations = 1;
  for (std::size_t n = 0; n < N; ++n) {
    if (configurations > kMaxEnumeration / K)
      throw InputError("exact likelihood: K^N exceeds " + std::to_string(kMaxEnumeration));
    configurations *= K;
  }
  for (auto w : segment.words)
    if (w >= model.vocab_size) throw InputError("exact likelihood: word id outside the vocabulary");

  double alpha_sum = 0.0;
  for (double a : model.alpha) alpha_sum += a;
  const double dirichlet_norm = log_gamma(alpha_sum) - log_gamma(alpha_sum + static_cast<double>(N));

  // Odometer over z in [0, K)^N with an online log-sum-exp.
  std::vector<std::size_t> z(N, 0);
  std::vector<std::size_t> topic_counts(K, 0);
  double run_max = -std::numeric_limits<double>::infinity(), run_sum = 0.0;
  for (std::uint64_t c = 0; c < configurations; ++c) {
    std::fill(topic_counts.begin(), topic_counts.end(), 0);
    double lp = dirichlet_norm;
    for (std::size_t n = 0; n < N; ++n) {
      lp += model.log_beta(segment.words[n], z[n]);
      ++topic_counts[z[n]];
    }
    for (std::size_t k = 0; k < K; ++k)
      lp += log_gamma(model.alpha[k] + static_cast<double>(topic_counts[k])) - log_gamma(model.alpha[k]);
    if (lp > run_max) {
      run_sum = run_sum * std::exp(run_max - lp) + 1.0;
      run_max = lp;
    } else {
      run_sum += std::exp(lp - run_max);
    }
    for (std::size_t n = 0; n < N; ++n) {
      if (++z[n] < K) break;
      z[n] = 0;
    }
  }
  return run_max + std::log(run_sum);
}

void write_model(const LdaModel &model, std::ostream &out, const std::string &metadata_json) {
  model.validate();
  detail::ByteWriter w;
  w.put_magic(kModelMagic);
  w.put(kModelFormatVersion);
  w.put(static_cast<std::uint32_t>(model.num_topics));
  w.put(static_cast<std::uint32_t>(model.vocab_size));
  for (double a : model.alpha) w.put(a);
  for (double lb : model.log_beta.data()) w.put(lb);
  w.put(static_cast<std::uint32_t>(metadata_json.size()));
  w.put_raw(metadata_json);
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw IoError("model write failure");
}

void write_model(const LdaModel &model, const std::filesystem::path &path,
                 const std::string &metadata_json) {
  std::ostringstream os;
  write_model(model, os, metadata_json);
  detail::write_file(path, os.str());
}

LdaModel read_model(std::istream &in, std::string *metadata_json) {
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  detail::ByteReader r(bytes, "model file");
  r.expect_magic(kModelMagic);
  auto version_at = r.offset();
  if (auto v = r.get<std::uint32_t>(); v != kModelFormatVersion)
    r.fail("unsupported version " + std::to_string(v), version_at);
  LdaModel model;
  auto shape_at = r.offset();
  model.num_topics = r.get<std::uint32_t>();
  model.vocab_size = r.get<std::uint32_t>();
  if (model.num_topics == 0 || model.vocab_size == 0) r.fail("empty model", shape_at);
  std::size_t cells = model.num_topics * model.vocab_size;
  if (r.remaining() / sizeof(double) < model.num_topics + cells) r.fail("truncated parameters");
  model.alpha.resize(model.num_topics);
  for (double &a : model.alpha) a = r.get<double>();
  model.log_beta = Matrix(model.vocab_size, model.num_topics);
  for (double &lb : model.log_beta.data()) lb = r.get<double>();
  auto meta_len = r.get<std::uint32_t>();
  auto meta = r.get_raw(meta_len);
  if (!r.at_end()) r.fail("trailing bytes");
  try {
    model.validate();
  } catch (const InputError &e) {
    r.fail(e.what(), shape_at);
  }
  if (metadata_json) *metadata_json = std::string(meta);
  return model;
}

LdaModel read_model(const std::filesystem::path &path, std::string *metadata_json) {
  std::istringstream in(detail::read_file(path));
  return read_model(in, metadata_json);
}

Matrix topic_word_probabilities(const LdaModel &model) {
  Matrix out(model.vocab_size, model.num_topics);
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = std::exp(model.log_beta.data()[i]);
  return out;
}

}  // namespace lddisc
