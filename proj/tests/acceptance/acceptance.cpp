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

// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lddisc/cli.hpp"
#include "lddisc/codebook.hpp"
#include "lddisc/config.hpp"
#include "lddisc/corpus.hpp"
#include "lddisc/corpus_io.hpp"
#include "lddisc/lda.hpp"
#include "lddisc/manifest.hpp"
#include "lddisc/metrics.hpp"
#include "lddisc/rng.hpp"
#include "lddisc/synth.hpp"

namespace fs = std::filesystem;
using namespace lddisc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

fs::path scratch(const std::string &name) {
  auto dir = fs::temp_directory_path() / ("lddisc_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

LdaModel random_model(Rng &rng, std::size_t K, std::size_t V) {
  LdaModel m;
  m.num_topics = K;
  m.vocab_size = V;
  m.alpha.resize(K);
  for (auto &a : m.alpha) a = 0.05 + 3.0 * rng.uniform();
  m.log_beta = Matrix(V, K);
  for (std::size_t k = 0; k < K; ++k) {
    auto col = rng.dirichlet(std::vector<double>(V, 0.7));
    for (std::size_t v = 0; v < V; ++v) m.log_beta(v, k) = std::log(std::max(col[v], 1e-300));
  }
  return m;
}

// 1. Bound validity and monotone E-step on tiny instances.
Outcome bound_validity() {
  Rng rng(101);
  std::size_t violations = 0, non_monotone = 0, instances = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (; instances < 2000; ++instances) {
    std::size_t K = 1 + rng.uniform_index(3), V = 1 + rng.uniform_index(5), N = 1 + rng.uniform_index(6);
    auto model = random_model(rng, K, V);
    QuantizedSegment seg{"s", std::nullopt, {}};
    for (std::size_t n = 0; n < N; ++n) seg.words.push_back(static_cast<std::uint32_t>(rng.uniform_index(V)));
    std::vector<double> trace;
    EStepOptions opts;
    opts.max_iters = 200;
    opts.converge_tol = 1e-10;
    opts.elbo_trace = &trace;
    auto post = e_step_segment(seg, model, opts);
    double exact = exact_marginal_log_likelihood(seg, model);
    for (double b : trace) {
      worst = std::max(worst, b - exact);
      if (b > exact + 1e-9) ++violations;
    }
    if (post.elbo > exact + 1e-9) ++violations;
    for (std::size_t i = 1; i < trace.size(); ++i)
      if (trace[i] < trace[i - 1] - 1e-12 * std::abs(trace[i - 1])) ++non_monotone;
  }
  return {violations == 0 && non_monotone == 0,
          std::to_string(instances) + " instances, max(bound - exact) = " + fmt("%.3g", worst) +
              ", gap increases = " + std::to_string(non_monotone)};
}

// 2. Corpus ELBO never decreases across EM iterations.
Outcome elbo_monotonicity() {
  LdaSynthSpec spec;
  spec.num_topics = 4;
  spec.vocab_size = 100;
  spec.num_segments = 500;
  spec.words_per_segment = 200;
  spec.seed = 202;
  auto data = synthesize(spec);
  LdaTrainConfig cfg;
  cfg.num_topics = 4;
  cfg.seed = 7;
  auto res = train(data.corpus, cfg);
  double worst = 0.0;
  bool ok = res.elbo_trace.size() >= 2;
  for (std::size_t i = 1; i < res.elbo_trace.size(); ++i) {
    double drop = (res.elbo_trace[i - 1] - res.elbo_trace[i]) / std::abs(res.elbo_trace[i - 1]);
    worst = std::max(worst, drop);
    if (drop > 1e-8) ok = false;
  }
  return {ok, std::to_string(res.elbo_trace.size()) + " EM iterations, worst relative drop " + fmt("%.3g", worst)};
}

// 3. Recovery of known topics and held-out domain assignment.
Outcome topic_recovery() {
  LdaSynthSpec spec;
  spec.num_topics = 4;
  spec.vocab_size = 100;
  spec.alpha = std::vector<double>(4, 0.1);
  spec.num_segments = 1000;
  spec.words_per_segment = 100;
  spec.seed = 303;
  auto train_data = synthesize(spec);
  LdaSynthSpec held = spec;
  held.beta = train_data.beta;
  held.num_segments = 500;
  held.seed = 304;
  auto test_data = synthesize(held);

  LdaTrainConfig cfg;
  cfg.num_topics = 4;
  cfg.seed = 11;
  auto res = train(train_data.corpus, cfg);
  auto match = match_topics(topic_word_probabilities(res.model), train_data.beta);
  std::vector<std::size_t> true_of_est(4);
  for (std::size_t t = 0; t < 4; ++t) true_of_est[match.permutation[t]] = t;

  auto posts = infer(test_data.corpus, res.model);
  std::size_t eligible = 0, agree = 0;
  for (std::size_t m = 0; m < posts.size(); ++m) {
    const auto &theta = test_data.theta[m];
    auto top = std::max_element(theta.begin(), theta.end());
    if (*top < 0.8) continue;
    ++eligible;
    if (true_of_est[assign_domain(posts[m])] == static_cast<std::size_t>(top - theta.begin())) ++agree;
  }
  double rate = eligible ? static_cast<double>(agree) / static_cast<double>(eligible) : 0.0;
  return {match.mean_cosine >= 0.9 && eligible > 0 && rate >= 0.9,
          "mean cosine " + fmt("%.4f", match.mean_cosine) + ", held-out agreement " + fmt("%.4f", rate) + " on " +
              std::to_string(eligible) + " segments"};
}

// Runs codebook, quantization, LDA and inference on a split corpus.
struct PipelineResult {
  DomainManifest train_manifest, test_manifest;
  SegmentInfoMap train_info, test_info;
};

PipelineResult run_pipeline(const FeatureCorpus &train_corpus, const FeatureCorpus &test_corpus, std::size_t V,
                            std::size_t K, std::uint64_t seed) {
  VqTrainConfig vq;
  vq.target_size = V;
  auto cb = train_codebook(train_corpus, vq).codebook;
  auto tq = quantize_corpus(train_corpus, cb);
  auto eq = quantize_corpus(test_corpus, cb);
  LdaTrainConfig cfg;
  cfg.num_topics = K;
  cfg.seed = seed;
  auto model = train(tq, cfg).model;
  PipelineResult r;
  r.train_manifest = make_manifest(tq, infer(tq, model), "acceptance", "{}");
  r.test_manifest = make_manifest(eq, infer(eq, model), "acceptance", "{}");
  r.train_info = segment_info(train_corpus);
  r.test_info = segment_info(test_corpus);
  return r;
}

// 4. Six sources, one bimodal: most sources own a domain, the bimodal one splits.
Outcome end_to_end_discovery() {
  GaussianPreset preset;  // 6 sources, first source bimodal
  preset.seed = 404;
  auto spec = make_gaussian_spec(preset);
  auto data = synthesize(spec);
  auto [train_corpus, test_corpus] = split(data.corpus, 10.0 / 11.0, 404);
  auto r = run_pipeline(train_corpus, test_corpus, 2048, 8, 404);
  auto table = label_domain_table(r.train_manifest, r.train_info, MassBasis::frames);

  std::size_t concentrated = 0;
  bool bimodal_split = true;
  std::string shares;
  for (std::size_t s = 0; s < table.labels.size(); ++s) {
    std::vector<double> row(table.cells.row(s).begin(), table.cells.row(s).end());
    std::sort(row.rbegin(), row.rend());
    double first = row[0] / table.row_totals[s], second = row[1] / table.row_totals[s];
    if (first >= 0.6) ++concentrated;
    std::size_t src = std::find_if(spec.sources.begin(), spec.sources.end(),
                                   [&](const GaussianSource &g) { return g.label == table.labels[s]; }) -
                      spec.sources.begin();
    if (spec.sources[src].conditions.size() > 1) {
      if (second < 0.2) bimodal_split = false;
      shares += " " + table.labels[s] + " top-two shares " + fmt("%.3f", first) + "/" + fmt("%.3f", second) + ";";
    }
  }
  return {concentrated >= 4 && bimodal_split && train_corpus.size() == 600,
          std::to_string(concentrated) + "/6 sources with >= 60% in one domain;" + shares};
}

// 5. Consistency grid on a four-source corpus.
Outcome consistency_grid_check() {
  auto dir = scratch("grid");
  RunConfig config;
  config.seed = 505;
  config.set("synth.num_sources", "4");
  config.set("sweep.codebook_sizes", "128,512,2048");
  config.set("sweep.num_domains", "4,8,16");
  cli::cmd_synth(config, dir);
  auto summary = cli::cmd_sweep(config, dir / cli::kTrainFeaturesFile, dir / cli::kTestFeaturesFile, dir / "sweep");
  std::ifstream in(dir / "sweep" / cli::kGridTsvFile);
  std::string line;
  std::getline(in, line);
  std::map<std::size_t, std::map<std::size_t, double>> kld;
  bool finite = true;
  std::size_t cells = 0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::size_t v, k;
    double value;
    row >> v >> k >> value;
    kld[v][k] = value;
    ++cells;
    if (!std::isfinite(value) || value < 0.0) finite = false;
  }
  bool ordered = true;
  std::string detail;
  for (auto &[v, row] : kld) {
    if (row[4] > row[16]) ordered = false;
    detail += " V=" + std::to_string(v) + ": K4 " + fmt("%.4g", row[4]) + ", K8 " + fmt("%.4g", row[8]) + ", K16 " +
              fmt("%.4g", row[16]) + ";";
  }
  fs::remove_all(dir);
  return {cells == 9 && summary.cells_run == 9 && finite && ordered, std::to_string(cells) + " cells;" + detail};
}

// Exhaustive k-means: best labelling over all k^n assignments.
double exhaustive_kmeans(const std::vector<double> &x, std::size_t n, std::size_t dim, std::size_t k,
                         std::vector<std::size_t> &best_labels) {
  std::vector<std::size_t> labels(n, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    std::vector<double> sum(k * dim, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++count[labels[i]];
      for (std::size_t d = 0; d < dim; ++d) sum[labels[i] * dim + d] += x[i * dim + d];
    }
    if (std::all_of(count.begin(), count.end(), [](std::size_t c) { return c > 0; })) {
      double cost = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d) {
          double c = x[i * dim + d] - sum[labels[i] * dim + d] / static_cast<double>(count[labels[i]]);
          cost += c * c;
        }
      if (cost < best) {
        best = cost;
        best_labels = labels;
      }
    }
    std::size_t pos = 0;
    while (pos < n && ++labels[pos] == k) labels[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

bool same_partition(const std::vector<std::uint32_t> &a, const std::vector<std::size_t> &b) {
  std::map<std::uint32_t, std::size_t> ab;
  std::map<std::size_t, std::uint32_t> ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [x, fresh_a] = ab.try_emplace(a[i], b[i]);
    auto [y, fresh_b] = ba.try_emplace(b[i], a[i]);
    if (x->second != b[i] || y->second != a[i]) return false;
  }
  return true;
}

// 6. Codebook against exhaustive and linear-scan oracles.
Outcome vq_correctness() {
  Rng rng(606);
  // (a) exhaustive oracle on small clustered sets.
  std::size_t mismatches = 0, trials = 0;
  for (; trials < 20; ++trials) {
    const std::size_t n = 10, dim = 2, k = 4;
    // Corners of a randomly placed and rotated 1.6:1 rectangle, short side
    // 10 to 20 noise deviations.
    const double theta = 6.283185307179586 * rng.uniform(), side = 10.0 + 10.0 * rng.uniform();
    const double ox = 20.0 * rng.normal(), oy = 20.0 * rng.normal();
    std::vector<double> centers;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double u = a * 1.6 * side, v = b * side;
        centers.push_back(ox + u * std::cos(theta) - v * std::sin(theta));
        centers.push_back(oy + u * std::sin(theta) + v * std::cos(theta));
      }
    std::vector<float> frames(n * dim);
    std::vector<double> x(n * dim);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < dim; ++d) {
        frames[i * dim + d] = static_cast<float>(centers[(i % k) * dim + d] + rng.normal());
        x[i * dim + d] = frames[i * dim + d];
      }
    VqTrainConfig cfg;
    cfg.target_size = k;
    cfg.normalize = false;
    auto res = train_codebook(frames, dim, cfg);
    std::vector<std::size_t> oracle;
    exhaustive_kmeans(x, n, dim, k, oracle);
    if (!same_partition(res.assignments, oracle)) {
      ++mismatches;
      std::fprintf(stderr, "exhaustive oracle mismatch in trial %zu\n", trials);
    }
  }
  // (b) 100 frames from four well-separated clusters: the generating partition is optimal.
  {
    const std::size_t n = 100, dim = 3, k = 4;
    std::vector<float> frames(n * dim);
    std::vector<std::size_t> truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = i % k;
      for (std::size_t d = 0; d < dim; ++d)
        frames[i * dim + d] = static_cast<float>((d == truth[i] % dim ? 30.0 : 0.0) * (truth[i] < 3 ? 1 : -1) +
                                                 rng.normal());
    }
    VqTrainConfig cfg;
    cfg.target_size = k;
    auto res = train_codebook(frames, dim, cfg);
    if (!same_partition(res.assignments, truth)) {
      ++mismatches;
      std::fprintf(stderr, "generating partition not recovered\n");
    }
    ++trials;
  }

  // (c) quantize_frame against a linear scan.
  GaussianPreset preset;
  preset.num_sources = 3;
  preset.segments_per_source = 10;
  preset.frames_per_segment = 100;
  preset.seed = 607;
  auto corpus = synthesize(make_gaussian_spec(preset)).corpus;
  VqTrainConfig cfg;
  cfg.target_size = 64;
  auto res = train_codebook(corpus, cfg);
  const auto &cb = res.codebook;
  std::size_t scan_mismatch = 0;
  const std::size_t probes = 100000;
  std::vector<float> frame(cb.dim());
  for (std::size_t p = 0; p < probes; ++p) {
    double spread = p % 2 ? 10.0 : 1.0;
    for (auto &f : frame) f = static_cast<float>(spread * rng.normal());
    std::uint32_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cb.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < cb.dim(); ++d) {
        double z = (static_cast<double>(frame[d]) - cb.offset()[d]) / cb.scale()[d];
        double c = z - static_cast<double>(cb.mean(j)[d]);
        d2 += c * c;
      }
      if (d2 < best_d) {
        best_d = d2;
        best = static_cast<std::uint32_t>(j);
      }
    }
    if (quantize_frame(frame, cb) != best) ++scan_mismatch;
  }

  // (d) distortion traces.
  bool monotone = true;
  double previous_level = std::numeric_limits<double>::infinity();
  for (const auto &level : res.levels) {
    for (std::size_t i = 1; i < level.distortion.size(); ++i)
      if (level.distortion[i] > level.distortion[i - 1] * (1.0 + 1e-12)) monotone = false;
    if (level.distortion.back() > previous_level * (1.0 + 1e-12)) monotone = false;
    previous_level = level.distortion.back();
  }
  return {mismatches == 0 && scan_mismatch == 0 && monotone,
          std::to_string(trials - mismatches) + "/" + std::to_string(trials) + " oracle partitions matched, " +
              std::to_string(scan_mismatch) + " linear-scan mismatches in " + std::to_string(probes) +
              " frames, distortion monotone: " + (monotone ? "yes" : "no")};
}

// 7. Smoothing and divergence values.
Outcome metric_exactness() {
  std::vector<double> one_zero{1.0, 0.0};
  auto s = smooth(one_zero, 0.03);
  bool exact = s.size() == 2 && s[0] == 0.97 && s[1] == 0.03;
  bool self_zero = kl_divergence(s, s) == 0.0;
  Rng rng(707);
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    std::size_t n = 2 + rng.uniform_index(15);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.uniform() < 0.3 ? 0.0 : std::floor(100.0 * rng.uniform());
      b[i] = rng.uniform() < 0.3 ? 0.0 : std::floor(100.0 * rng.uniform());
    }
    a[0] += 1.0;
    b[n - 1] += 1.0;
    auto p = smooth(a), q = smooth(b);
    worst = std::min(worst, kl_divergence(p, q));
    if (kl_divergence(p, p) != 0.0) self_zero = false;
  }
  std::vector<double> half{0.5, 0.5};
  double value = kl_divergence(s, half);
  double expected = 0.97 * std::log(1.94) + 0.03 * std::log(0.06);
  bool hand = std::abs(value - expected) <= 1e-9;
  return {exact && self_zero && worst >= -1e-12 && hand,
          "smooth exact: " + std::string(exact ? "yes" : "no") + ", min KLD " + fmt("%.3g", worst) +
              ", KLD(smooth([1,0])||[0.5,0.5]) = " + fmt("%.12f", value)};
}

std::map<std::string, std::string> snapshot(const fs::path &dir) {
  std::map<std::string, std::string> files;
  for (const auto &entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    files[fs::relative(entry.path(), dir).string()] =
        std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }
  return files;
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "lddisc");
  std::vector<char *> argv;
  for (auto &a : args) argv.push_back(a.data());
  std::ostringstream sink;
  auto *saved = std::cout.rdbuf(sink.rdbuf());
  int code = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(saved);
  return code;
}

// 8. Byte-identical reruns of every command, valid manifests.
Outcome reproducibility() {
  const std::vector<std::string> small{"--seed", "808", "--set", "synth.num_sources=3", "--set",
                                       "synth.segments_per_source=11", "--set", "synth.frames_per_segment=50",
                                       "--set", "codebook.size=32", "--set", "lda.num_domains=4", "--set",
                                       "sweep.codebook_sizes=16,32", "--set", "sweep.num_domains=2,3"};
  auto with = [&](std::vector<std::string> head, const fs::path &out) {
    head.insert(head.end(), small.begin(), small.end());
    head.push_back("--out");
    head.push_back(out.string());
    return head;
  };
  std::vector<std::map<std::string, std::string>> runs;
  int failures = 0;
  for (int r = 0; r < 2; ++r) {
    auto d = scratch("repro" + std::to_string(r));
    std::string s = d.string();
    failures += invoke(with({"synth"}, d)) != 0;
    failures += invoke(with({"train-codebook", "--features", s + "/train.ldfc", "--text"}, d)) != 0;
    failures += invoke(with({"quantize", "--features", s + "/train.ldfc", "--codebook", s + "/codebook.ldcb"}, d)) != 0;
    failures += invoke(with({"quantize", "--features", s + "/test.ldfc", "--codebook", s + "/codebook.ldcb"}, d)) != 0;
    failures += invoke(with({"train-lda", "--quantized", s + "/train.ldqc"}, d)) != 0;
    failures += invoke(with({"infer", "--quantized", s + "/test.ldqc", "--model", s + "/model.ldam"}, d)) != 0;
    failures += invoke(with({"report", "--train-manifest", s + "/train_manifest.tsv", "--test-manifest",
                             s + "/test_manifest.tsv", "--train-corpus", s + "/train.ldfc", "--test-corpus",
                             s + "/test.ldfc", "--codebook-size", "32"},
                            d / "report")) != 0;
    failures += invoke(with({"sweep", "--train", s + "/train.ldfc", "--test", s + "/test.ldfc"}, d / "sweep")) != 0;
    runs.push_back(snapshot(d));
    fs::remove_all(d);
  }
  std::size_t differing = 0, manifests = 0, bad_manifests = 0;
  for (const auto &[name, bytes] : runs[0]) {
    auto it = runs[1].find(name);
    if (it == runs[1].end() || it->second != bytes) ++differing;
    if (name.size() > 13 && name.substr(name.size() - 13) == "_manifest.tsv") {
      ++manifests;
      try {
        std::istringstream in(bytes);
        auto m = read_manifest(in);
        for (const auto &e : m.entries)
          if (e.domain != assign_domain(e.gamma)) ++bad_manifests;
      } catch (const std::exception &) {
        ++bad_manifests;
      }
    }
  }
  bool ok = failures == 0 && differing == 0 && runs[0].size() == runs[1].size() && manifests > 0 && bad_manifests == 0;
  return {ok, std::to_string(runs[0].size()) + " files compared, " + std::to_string(differing) + " differ, " +
                  std::to_string(manifests) + " manifests checked, " + std::to_string(failures) + " command failures"};
}

}  // namespace

int main(int argc, char **argv) {
  struct Criterion {
    int id;
    const char *name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "variational bound validity", bound_validity},
      {2, "ELBO monotonicity", elbo_monotonicity},
      {3, "topic recovery", topic_recovery},
      {4, "end-to-end discovery", end_to_end_discovery},
      {5, "consistency grid", consistency_grid_check},
      {6, "VQ correctness", vq_correctness},
      {7, "metric exactness", metric_exactness},
      {8, "reproducibility", reproducibility},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto &c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
