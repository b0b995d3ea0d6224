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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <doctest.h>

#include "lddisc/error.hpp"
#include "lddisc/lda.hpp"
#include "lddisc/rng.hpp"
#include "lddisc/synth.hpp"

using namespace lddisc;

namespace {

LdaModel random_model(Rng &rng, std::size_t K, std::size_t V, double alpha_lo = 0.2) {
  LdaModel m;
  m.num_topics = K;
  m.vocab_size = V;
  for (std::size_t k = 0; k < K; ++k) m.alpha.push_back(alpha_lo + 2.0 * rng.uniform());
  m.log_beta = Matrix(V, K);
  for (std::size_t k = 0; k < K; ++k) {
    auto col = rng.dirichlet(std::vector<double>(V, 1.0));
    for (std::size_t v = 0; v < V; ++v) m.log_beta(v, k) = std::log(col[v]);
  }
  return m;
}

QuantizedSegment random_segment(Rng &rng, std::size_t V, std::size_t N) {
  QuantizedSegment s{"s", std::nullopt, {}};
  for (std::size_t n = 0; n < N; ++n) s.words.push_back(static_cast<std::uint32_t>(rng.uniform_index(V)));
  return s;
}

// log p(w) for K=2 by quadrature over theta ~ Beta(a0, a1).
double two_topic_likelihood(const QuantizedSegment &s, const LdaModel &m) {
  const double a0 = m.alpha[0], a1 = m.alpha[1];
  const double log_b = std::lgamma(a0) + std::lgamma(a1) - std::lgamma(a0 + a1);
  auto f = [&](double t) {
    double log_p = (a0 - 1.0) * std::log(t) + (a1 - 1.0) * std::log1p(-t) - log_b;
    for (auto w : s.words) log_p += std::log(t * std::exp(m.log_beta(w, 0)) + (1.0 - t) * std::exp(m.log_beta(w, 1)));
    return std::exp(log_p);
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  return std::log(integrator.integrate(f, 0.0, 1.0));
}

}  // namespace

TEST_CASE("exact likelihood agrees with quadrature for two topics") {
  Rng rng(1);
  for (int t = 0; t < 40; ++t) {
    auto m = random_model(rng, 2, 4, 1.0);
    auto s = random_segment(rng, 4, 1 + rng.uniform_index(6));
    CHECK(exact_marginal_log_likelihood(s, m) == doctest::Approx(two_topic_likelihood(s, m)).epsilon(1e-8));
  }
}

TEST_CASE("one topic: bound is exact") {
  Rng rng(2);
  auto m = random_model(rng, 1, 5);
  auto s = random_segment(rng, 5, 6);
  double direct = 0.0;
  for (auto w : s.words) direct += m.log_beta(w, 0);
  auto post = e_step_segment(s, m);
  CHECK(post.elbo == doctest::Approx(direct).epsilon(1e-12));
  CHECK(exact_marginal_log_likelihood(s, m) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("bound never exceeds the exact likelihood and grows per iteration") {
  Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    std::size_t K = 1 + rng.uniform_index(3), V = 1 + rng.uniform_index(5);
    auto m = random_model(rng, K, V, 0.05);
    auto s = random_segment(rng, V, 1 + rng.uniform_index(6));
    std::vector<double> trace;
    EStepOptions o;
    o.elbo_trace = &trace;
    auto post = e_step_segment(s, m, o);
    double exact = exact_marginal_log_likelihood(s, m);
    for (std::size_t i = 0; i < trace.size(); ++i) {
      REQUIRE(trace[i] <= exact + 1e-9);
      if (i) REQUIRE(trace[i] >= trace[i - 1] - 1e-12 * std::abs(trace[i - 1]));
    }
    CHECK(post.elbo == doctest::Approx(segment_elbo(s, m, post.gamma, post.phi)).epsilon(1e-12));
  }
}

TEST_CASE("posterior structure") {
  Rng rng(4);
  auto m = random_model(rng, 3, 6);
  auto s = random_segment(rng, 6, 20);
  auto post = e_step_segment(s, m);
  REQUIRE(post.phi.rows() == 20);
  double gsum = 0.0;
  for (std::size_t k = 0; k < 3; ++k) gsum += post.gamma[k];
  double asum = std::accumulate(m.alpha.begin(), m.alpha.end(), 0.0);
  CHECK(gsum == doctest::Approx(asum + 20.0).epsilon(1e-12));
  for (std::size_t n = 0; n < 20; ++n) {
    auto row = post.phi.row(n);
    CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("relabelling the vocabulary leaves the posterior unchanged") {
  Rng rng(5);
  auto m = random_model(rng, 3, 7);
  auto s = random_segment(rng, 7, 30);
  std::vector<std::uint32_t> perm(7);
  std::iota(perm.begin(), perm.end(), 0u);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[1], perm[4]);
  LdaModel mp = m;
  for (std::size_t v = 0; v < 7; ++v)
    for (std::size_t k = 0; k < 3; ++k) mp.log_beta(perm[v], k) = m.log_beta(v, k);
  QuantizedSegment sp = s;
  for (auto &w : sp.words) w = perm[w];
  auto a = e_step_segment(s, m), b = e_step_segment(sp, mp);
  CHECK(a.gamma == b.gamma);
  CHECK(a.elbo == b.elbo);
}

TEST_CASE("permuting topics permutes gamma") {
  Rng rng(6);
  auto m = random_model(rng, 3, 5);
  auto s = random_segment(rng, 5, 12);
  const std::size_t perm[3] = {2, 0, 1};
  LdaModel mp = m;
  for (std::size_t k = 0; k < 3; ++k) {
    mp.alpha[perm[k]] = m.alpha[k];
    for (std::size_t v = 0; v < 5; ++v) mp.log_beta(v, perm[k]) = m.log_beta(v, k);
  }
  auto a = e_step_segment(s, m), b = e_step_segment(s, mp);
  for (std::size_t k = 0; k < 3; ++k) CHECK(b.gamma[perm[k]] == doctest::Approx(a.gamma[k]).epsilon(1e-9));
}

TEST_CASE("argmax ties go to the lowest domain") {
  CHECK(assign_domain(std::vector<double>{1.0, 3.0, 3.0}) == 1);
  CHECK(assign_domain(std::vector<double>{2.0}) == 0);
}

TEST_CASE("identical one-word segments with one topic") {
  QuantizedCorpus c;
  c.vocab_size = 5;
  for (int i = 0; i < 10; ++i) c.segments.push_back({"d" + std::to_string(i), std::nullopt, {3}});
  LdaTrainConfig cfg;
  cfg.num_topics = 1;
  cfg.beta_smoothing = 0.0;
  auto res = train(c, cfg);
  CHECK(res.model.log_beta(3, 0) == 0.0);
  for (std::size_t v : {0, 1, 2, 4}) CHECK(std::exp(res.model.log_beta(v, 0)) < 1e-300);
}

TEST_CASE("training: normalized topics, monotone bound, deterministic") {
  LdaSynthSpec spec;
  spec.num_segments = 120;
  spec.words_per_segment = 60;
  spec.vocab_size = 30;
  spec.num_topics = 3;
  spec.seed = 8;
  auto data = synthesize(spec);
  LdaTrainConfig cfg;
  cfg.num_topics = 3;
  cfg.seed = 2;
  auto a = train(data.corpus, cfg);
  auto b = train(data.corpus, cfg);
  CHECK(a.model == b.model);
  auto beta = topic_word_probabilities(a.model);
  for (std::size_t k = 0; k < 3; ++k) {
    double s = 0.0;
    for (std::size_t v = 0; v < 30; ++v) s += beta(v, k);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (std::size_t i = 1; i < a.elbo_trace.size(); ++i)
    CHECK(a.elbo_trace[i] >= a.elbo_trace[i - 1] - 1e-8 * std::abs(a.elbo_trace[i - 1]));
  CHECK(a.alpha_trace.size() == a.elbo_trace.size());
  CHECK(corpus_elbo(data.corpus, a.model, infer(data.corpus, a.model)) <= 0.0);

  LdaTrainConfig fixed = cfg;
  fixed.alpha_mode = AlphaMode::fixed;
  fixed.alpha = 0.3;
  CHECK(train(data.corpus, fixed).model.alpha == std::vector<double>(3, 0.3));
}

TEST_CASE("unseen and out-of-vocabulary words") {
  QuantizedCorpus c;
  c.vocab_size = 4;
  c.segments.push_back({"a", std::nullopt, {0, 0, 1}});
  c.segments.push_back({"b", std::nullopt, {1, 1, 0}});
  LdaTrainConfig cfg;
  cfg.num_topics = 2;
  auto model = train(c, cfg).model;
  QuantizedCorpus test;
  test.vocab_size = 4;
  test.segments.push_back({"t", std::nullopt, {3, 3}});
  auto post = infer(test, model);
  for (double g : post[0].gamma) CHECK(std::isfinite(g));
  test.segments[0].words[0] = 4;
  test.vocab_size = 5;
  CHECK_THROWS_AS(infer(test, model), InputError);
}

TEST_CASE("model file round trip and corruption") {
  Rng rng(9);
  auto m = random_model(rng, 3, 6);
  std::stringstream ss;
  write_model(m, ss, "{}");
  std::string bytes = ss.str();
  std::istringstream in(bytes);
  CHECK(read_model(in) == m);
  std::istringstream cut(bytes.substr(0, bytes.size() - 7));
  CHECK_THROWS_AS(read_model(cut), FormatError);
}

TEST_CASE("enumeration limit") {
  Rng rng(10);
  auto m = random_model(rng, 3, 4);
  auto s = random_segment(rng, 4, 13);  // 3^13 > 10^6
  CHECK_THROWS_AS(exact_marginal_log_likelihood(s, m), InputError);
}
