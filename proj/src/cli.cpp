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

#include "lddisc/cli.hpp"

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "binio.hpp"
#include "lddisc/corpus_io.hpp"
#include "lddisc/error.hpp"
#include "lddisc/hash.hpp"
#include "lddisc/manifest.hpp"
#include "lddisc/rng.hpp"

namespace lddisc::cli {

using json = nlohmann::ordered_json;

namespace {

void ensure_dir(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path &path, const json &j) { detail::write_file(path, j.dump(2) + "\n"); }

json config_echo(const RunConfig &config) { return json::parse(config.to_json()); }

json file_digests(const std::vector<fs::path> &paths) {
  json j = json::object();
  for (const auto &p : paths) j[p.filename().string()] = sha256_file(p);
  return j;
}

// Sidecar recording the configuration and the digests of inputs and outputs.
void write_run_record(const fs::path &out_dir, const std::string &name, const std::string &command,
                      const RunConfig &config, const std::vector<fs::path> &inputs,
                      const std::vector<fs::path> &outputs) {
  json j;
  j["command"] = command;
  j["seed"] = config.seed;
  j["config"] = config_echo(config);
  j["inputs"] = file_digests(inputs);
  j["outputs"] = file_digests(outputs);
  write_json(out_dir / name, j);
}

std::string number_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool has_prefix(const std::string &bytes, const char *magic) { return bytes.rfind(magic, 0) == 0; }

// Labels and lengths of a feature or quantized corpus file.
SegmentInfoMap read_segment_info(const fs::path &path) {
  std::string bytes = detail::read_file(path);
  std::istringstream in(bytes);
  if (has_prefix(bytes, "LDFC") || has_prefix(bytes, "#LDFC")) return segment_info(read_features(in));
  if (has_prefix(bytes, "LDQC") || has_prefix(bytes, "#LDQC")) return segment_info(read_quantized(in));
  throw FormatError(path.string() + ": not a feature or quantized corpus", 0);
}

SegmentInfoMap info_from_manifest(const DomainManifest &manifest) {
  SegmentInfoMap info;
  for (const auto &e : manifest.entries) info[e.segment_id] = {e.label, 0};
  return info;
}

std::string table_tsv(const LabelDomainTable &t) {
  std::string out = "label";
  for (std::size_t k = 0; k < t.num_domains; ++k) out += "\tD" + std::to_string(k);
  out += "\ttotal\n";
  for (std::size_t r = 0; r < t.labels.size(); ++r) {
    out += t.labels[r];
    for (std::size_t k = 0; k < t.num_domains; ++k) out += "\t" + number_text(t.cells(r, k));
    out += "\t" + number_text(t.row_totals[r]) + "\n";
  }
  out += "total";
  for (double c : t.col_totals) out += "\t" + number_text(c);
  out += "\t" + number_text(t.total) + "\n";
  return out;
}

json table_json(const LabelDomainTable &t, const RunConfig &config) {
  json j;
  j["basis"] = to_string(t.basis);
  j["num_domains"] = t.num_domains;
  j["labels"] = t.labels;
  json rows = json::array();
  for (std::size_t r = 0; r < t.labels.size(); ++r) {
    auto row = t.cells.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["cells"] = rows;
  j["row_totals"] = t.row_totals;
  j["col_totals"] = t.col_totals;
  j["total"] = t.total;
  j["config"] = config_echo(config);
  return j;
}

std::string grid_tsv(const std::vector<GridCell> &cells) {
  std::string out = "V\tK\tkld\n";
  for (const auto &c : cells)
    out += std::to_string(c.codebook_size) + "\t" + std::to_string(c.num_domains) + "\t" + number_text(c.kld) + "\n";
  return out;
}

json grid_json(const std::vector<GridCell> &cells, const RunConfig &config) {
  json j;
  j["basis"] = to_string(config.report.basis);
  j["discount"] = config.report.discount;
  json arr = json::array();
  for (const auto &c : cells)
    arr.push_back({{"V", c.codebook_size},
                   {"K", c.num_domains},
                   {"kld", c.kld},
                   {"train_distribution", c.train_distribution},
                   {"test_distribution", c.test_distribution}});
  j["cells"] = arr;
  j["config"] = config_echo(config);
  return j;
}

EStepOptions inference_options(const RunConfig &config) {
  EStepOptions opts;
  opts.max_iters = config.lda.estep_max_iters;
  opts.converge_tol = config.lda.estep_converge_tol;
  opts.keep_phi = false;
  return opts;
}

json codebook_metadata(const RunConfig &config, const VqTrainResult &res, const std::string &input_digest) {
  json j;
  j["config"] = config_echo(config);
  j["seed"] = config.seed;
  j["input_sha256"] = input_digest;
  j["normalized"] = res.codebook.normalized();
  j["training_distortion"] = res.codebook.training_distortion();
  json levels = json::array();
  for (const auto &l : res.levels)
    levels.push_back({{"size", l.size}, {"distortion", l.distortion}, {"reseeded", l.reseeded}});
  j["levels"] = levels;
  return j;
}

json model_metadata(const RunConfig &config, const LdaTrainResult &res, const std::string &input_digest) {
  json j;
  j["config"] = config_echo(config);
  j["seed"] = config.seed;
  j["input_sha256"] = input_digest;
  j["final_elbo"] = res.elbo_trace.back();
  j["elbo_trace"] = res.elbo_trace;
  j["alpha_trace"] = res.alpha_trace;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  return j;
}

fs::path with_suffix(const fs::path &dir, const fs::path &input, const std::string &suffix) {
  return dir / (input.stem().string() + suffix);
}

}  // namespace

std::vector<fs::path> cmd_synth(const RunConfig &config, const fs::path &out_dir) {
  ensure_dir(out_dir);
  std::vector<fs::path> outputs;
  json truth;
  truth["regime"] = config.synth.regime;
  truth["seed"] = config.seed;
  truth["rng"] = std::string(Rng::kAlgorithmName) + "/v" + std::to_string(Rng::kAlgorithmVersion);
  truth["config"] = config_echo(config);
  const double fraction = config.synth.train_fraction;
  if (fraction != 0.0 && !(fraction > 0.0 && fraction < 1.0))
    throw SpecError("synth.train_fraction must be 0 (no split) or lie in (0, 1)");

  if (config.synth.regime == "gaussian") {
    auto spec = make_gaussian_spec(config.gaussian_preset());
    auto result = synthesize(spec);
    outputs.push_back(out_dir / kFeaturesFile);
    write_features(result.corpus, outputs.back());
    if (fraction > 0.0) {
      auto [train, test] = split(result.corpus, fraction, config.seed);
      outputs.push_back(out_dir / kTrainFeaturesFile);
      write_features(train, outputs.back());
      outputs.push_back(out_dir / kTestFeaturesFile);
      write_features(test, outputs.back());
    }
    json sources = json::array();
    for (const auto &src : spec.sources) sources.push_back({{"label", src.label}, {"conditions", src.conditions.size()}});
    truth["sources"] = sources;
    json segs = json::array();
    for (std::size_t m = 0; m < result.corpus.segments.size(); ++m)
      segs.push_back({{"id", result.corpus.segments[m].id},
                      {"source", result.truth.source[m]},
                      {"condition", result.truth.condition[m]}});
    truth["segments"] = segs;
  } else {
    auto result = synthesize(config.lda_synth_spec());
    outputs.push_back(out_dir / kCorpusFile);
    write_quantized(result.corpus, outputs.back());
    if (fraction > 0.0) {
      auto [train, test] = split(result.corpus, fraction, config.seed);
      outputs.push_back(out_dir / kTrainQuantizedFile);
      write_quantized(train, outputs.back());
      outputs.push_back(out_dir / kTestQuantizedFile);
      write_quantized(test, outputs.back());
    }
    truth["alpha"] = result.alpha;
    json beta = json::array();
    for (std::size_t i = 0; i < result.beta.rows(); ++i) {
      auto row = result.beta.row(i);
      beta.push_back(std::vector<double>(row.begin(), row.end()));
    }
    truth["beta"] = beta;
    json segs = json::array();
    for (std::size_t m = 0; m < result.corpus.segments.size(); ++m)
      segs.push_back({{"id", result.corpus.segments[m].id}, {"theta", result.theta[m]}});
    truth["segments"] = segs;
  }
  outputs.push_back(out_dir / kTruthFile);
  write_json(outputs.back(), truth);
  write_run_record(out_dir, "run_synth.json", "synth", config, {}, outputs);
  return outputs;
}

fs::path cmd_train_codebook(const RunConfig &config, const fs::path &features, const fs::path &out_dir,
                            bool text_export) {
  ensure_dir(out_dir);
  auto corpus = read_features(features);
  auto res = train_codebook(corpus, config.codebook_config());
  auto path = out_dir / kCodebookFile;
  write_codebook(res.codebook, path, codebook_metadata(config, res, sha256_file(features)).dump());
  std::vector<fs::path> outputs{path};
  if (text_export) {
    std::ostringstream os;
    write_codebook_text(res.codebook, os);
    outputs.push_back(out_dir / "codebook.txt");
    detail::write_file(outputs.back(), os.str());
  }
  write_run_record(out_dir, "run_train-codebook.json", "train-codebook", config, {features}, outputs);
  return path;
}

fs::path cmd_quantize(const RunConfig &config, const fs::path &features, const fs::path &codebook,
                      const fs::path &out_dir) {
  ensure_dir(out_dir);
  auto corpus = read_features(features);
  auto cb = read_codebook(codebook);
  auto path = with_suffix(out_dir, features, ".ldqc");
  write_quantized(quantize_corpus(corpus, cb), path);
  write_run_record(out_dir, "run_quantize_" + features.stem().string() + ".json", "quantize", config,
                   {features, codebook}, {path});
  return path;
}

fs::path cmd_train_lda(const RunConfig &config, const fs::path &quantized, const fs::path &out_dir) {
  ensure_dir(out_dir);
  auto corpus = read_quantized(quantized);
  auto res = train(corpus, config.lda_config());
  auto model_path = out_dir / kModelFile;
  write_model(res.model, model_path, model_metadata(config, res, sha256_file(quantized)).dump());
  auto fingerprint = sha256_file(model_path);
  auto posteriors = infer(corpus, res.model, inference_options(config));
  auto manifest = make_manifest(corpus, posteriors, fingerprint, config.to_json());
  auto manifest_path = out_dir / kTrainManifestFile;
  write_manifest(manifest, manifest_path);
  write_run_record(out_dir, "run_train-lda.json", "train-lda", config, {quantized}, {model_path, manifest_path});
  return manifest_path;
}

fs::path cmd_infer(const RunConfig &config, const fs::path &quantized, const fs::path &model,
                   const fs::path &out_dir) {
  ensure_dir(out_dir);
  auto corpus = read_quantized(quantized);
  auto lda_model = read_model(model);
  auto posteriors = infer(corpus, lda_model, inference_options(config));
  auto manifest = make_manifest(corpus, posteriors, sha256_file(model), config.to_json());
  auto path = with_suffix(out_dir, quantized, "_manifest.tsv");
  write_manifest(manifest, path);
  write_run_record(out_dir, "run_infer_" + quantized.stem().string() + ".json", "infer", config,
                   {quantized, model}, {path});
  return path;
}

namespace {

struct ReportArtifacts {
  LabelDomainTable train_table, test_table;
  GridCell cell;
};

ReportArtifacts build_report(const RunConfig &config, const DomainManifest &train_manifest,
                             const DomainManifest &test_manifest, const SegmentInfoMap &train_info,
                             const SegmentInfoMap &test_info, std::size_t codebook_size) {
  if (train_manifest.num_domains != test_manifest.num_domains)
    throw InputError("report: train and test manifests have different K");
  const std::size_t K = train_manifest.num_domains;
  ReportArtifacts a;
  a.train_table = label_domain_table(train_manifest, train_info, config.report.basis);
  a.test_table = label_domain_table(test_manifest, test_info, config.report.basis);
  std::size_t sizes[] = {codebook_size};
  std::size_t ks[] = {K};
  GridRun run{codebook_size, K, &train_manifest, &test_manifest, &train_info, &test_info};
  a.cell = consistency_grid(sizes, ks, {&run, 1}, config.report.basis, config.report.discount).front();
  return a;
}

std::vector<fs::path> write_report(const RunConfig &config, const ReportArtifacts &a, const fs::path &dir) {
  std::vector<fs::path> out;
  auto put = [&](const char *name, const std::string &bytes) {
    out.push_back(dir / name);
    detail::write_file(out.back(), bytes);
  };
  put("table_train.tsv", table_tsv(a.train_table));
  put("table_train.json", table_json(a.train_table, config).dump(2) + "\n");
  put("table_test.tsv", table_tsv(a.test_table));
  put("table_test.json", table_json(a.test_table, config).dump(2) + "\n");
  json kld;
  kld["V"] = a.cell.codebook_size;
  kld["K"] = a.cell.num_domains;
  kld["basis"] = to_string(config.report.basis);
  kld["discount"] = config.report.discount;
  kld["train_distribution"] = a.cell.train_distribution;
  kld["test_distribution"] = a.cell.test_distribution;
  kld["kld_train_test"] = a.cell.kld;
  kld["config"] = config_echo(config);
  put("kld.json", kld.dump(2) + "\n");
  return out;
}

}  // namespace

std::vector<fs::path> cmd_report(const RunConfig &config, const ReportInputs &inputs, const fs::path &out_dir) {
  ensure_dir(out_dir);
  auto train_manifest = read_manifest(inputs.train_manifest);
  auto test_manifest = read_manifest(inputs.test_manifest);
  auto train_info = inputs.train_corpus.empty() ? info_from_manifest(train_manifest)
                                                : read_segment_info(inputs.train_corpus);
  auto test_info = inputs.test_corpus.empty() ? info_from_manifest(test_manifest)
                                              : read_segment_info(inputs.test_corpus);
  if (config.report.basis == MassBasis::frames && (inputs.train_corpus.empty() || inputs.test_corpus.empty()))
    throw InputError("report: the frames basis needs --train-corpus and --test-corpus");
  auto artifacts = build_report(config, train_manifest, test_manifest, train_info, test_info, inputs.codebook_size);
  auto outputs = write_report(config, artifacts, out_dir);
  std::vector<GridCell> cells{artifacts.cell};
  outputs.push_back(out_dir / kGridTsvFile);
  detail::write_file(outputs.back(), grid_tsv(cells));
  outputs.push_back(out_dir / kGridJsonFile);
  write_json(outputs.back(), grid_json(cells, config));
  std::vector<fs::path> in{inputs.train_manifest, inputs.test_manifest};
  if (!inputs.train_corpus.empty()) in.push_back(inputs.train_corpus);
  if (!inputs.test_corpus.empty()) in.push_back(inputs.test_corpus);
  write_run_record(out_dir, "run_report.json", "report", config, in, outputs);
  return outputs;
}

namespace {

std::string cell_name(std::size_t v, std::size_t k) { return "V" + std::to_string(v) + "_K" + std::to_string(k); }

enum class CellState { missing, stale, corrupt, complete };

// A cell is complete when its record matches the expected key and every
// recorded output still has its recorded digest.
CellState inspect_cell(const fs::path &dir, const std::string &key) {
  auto record = dir / kCellFile;
  if (!fs::exists(record)) return fs::exists(dir) ? CellState::corrupt : CellState::missing;
  json j;
  try {
    j = json::parse(detail::read_file(record));
  } catch (const json::exception &) {
    return CellState::corrupt;
  }
  if (!j.contains("key") || j["key"] != key) return CellState::stale;
  if (!j.contains("outputs") || !j["outputs"].is_object()) return CellState::corrupt;
  for (const auto &[name, digest] : j["outputs"].items()) {
    auto p = dir / name;
    if (!fs::exists(p) || sha256_file(p) != digest.get<std::string>()) return CellState::corrupt;
  }
  return CellState::complete;
}

}  // namespace

SweepSummary cmd_sweep(const RunConfig &config, const fs::path &train_features, const fs::path &test_features,
                       const fs::path &out_dir) {
  ensure_dir(out_dir);
  const auto &sizes = config.sweep.codebook_sizes;
  const auto &ks = config.sweep.domain_counts;
  if (sizes.empty() || ks.empty()) throw SpecError("sweep: codebook and domain lists must be non-empty");
  const std::string train_digest = sha256_file(train_features);
  const std::string test_digest = sha256_file(test_features);
  std::optional<FeatureCorpus> train_corpus, test_corpus;
  auto load_inputs = [&] {
    if (!train_corpus) train_corpus = read_features(train_features);
    if (!test_corpus) test_corpus = read_features(test_features);
  };

  SweepSummary summary;
  for (auto v : sizes) {
    std::optional<VqTrainResult> vq;
    std::optional<QuantizedCorpus> train_q, test_q;
    for (auto k : ks) {
      RunConfig cell_config = config;
      cell_config.codebook.target_size = v;
      cell_config.lda.num_topics = k;
      const fs::path dir = out_dir / cell_name(v, k);
      const std::string key = sha256_hex(cell_config.to_json() + "\n" + train_digest + "\n" + test_digest);
      auto state = inspect_cell(dir, key);
      if (state == CellState::complete) {
        ++summary.cells_skipped;
        continue;
      }
      if (state == CellState::corrupt) {
        std::cerr << "sweep: cell " << dir.filename().string() << " failed its fingerprint check; recomputing\n";
        ++summary.cells_repaired;
      } else {
        ++summary.cells_run;
      }
      ensure_dir(dir);
      std::error_code ec;
      fs::remove(dir / kCellFile, ec);

      load_inputs();
      if (!vq) {
        vq = train_codebook(*train_corpus, cell_config.codebook_config());
        train_q = quantize_corpus(*train_corpus, vq->codebook);
        test_q = quantize_corpus(*test_corpus, vq->codebook);
      }
      std::vector<fs::path> outputs;
      auto track = [&](const fs::path &p) {
        outputs.push_back(p);
        return p;
      };
      detail::write_file(track(dir / "config.txt"), cell_config.to_text());
      write_codebook(vq->codebook, track(dir / kCodebookFile),
                     codebook_metadata(cell_config, *vq, train_digest).dump());
      write_quantized(*train_q, track(dir / kTrainQuantizedFile));
      write_quantized(*test_q, track(dir / kTestQuantizedFile));
      auto lda = train(*train_q, cell_config.lda_config());
      const std::string q_digest = sha256_file(dir / kTrainQuantizedFile);
      write_model(lda.model, track(dir / kModelFile), model_metadata(cell_config, lda, q_digest).dump());
      const std::string fingerprint = sha256_file(dir / kModelFile);
      auto opts = inference_options(cell_config);
      auto train_manifest = make_manifest(*train_q, infer(*train_q, lda.model, opts), fingerprint, cell_config.to_json());
      auto test_manifest = make_manifest(*test_q, infer(*test_q, lda.model, opts), fingerprint, cell_config.to_json());
      write_manifest(train_manifest, track(dir / kTrainManifestFile));
      write_manifest(test_manifest, track(dir / kTestManifestFile));
      auto train_info = segment_info(*train_q);
      auto test_info = segment_info(*test_q);
      auto artifacts = build_report(cell_config, train_manifest, test_manifest, train_info, test_info, v);
      for (auto &p : write_report(cell_config, artifacts, dir)) outputs.push_back(p);

      json record;
      record["key"] = key;
      record["V"] = v;
      record["K"] = k;
      record["inputs"] = {{"train", train_digest}, {"test", test_digest}};
      json digests = json::object();
      for (const auto &p : outputs) digests[p.filename().string()] = sha256_file(p);
      record["outputs"] = digests;
      write_json(dir / kCellFile, record);
    }
  }

  // Consolidated grid from the cell manifests on disk.
  std::vector<DomainManifest> manifests;
  std::vector<SegmentInfoMap> infos;
  manifests.reserve(2 * sizes.size() * ks.size());
  infos.reserve(2 * sizes.size() * ks.size());
  std::vector<GridRun> runs;
  for (auto v : sizes)
    for (auto k : ks) {
      const fs::path dir = out_dir / cell_name(v, k);
      manifests.push_back(read_manifest(dir / kTrainManifestFile));
      manifests.push_back(read_manifest(dir / kTestManifestFile));
      infos.push_back(segment_info(read_quantized(dir / kTrainQuantizedFile)));
      infos.push_back(segment_info(read_quantized(dir / kTestQuantizedFile)));
    }
  for (std::size_t i = 0, c = 0; i < sizes.size(); ++i)
    for (std::size_t j = 0; j < ks.size(); ++j, ++c)
      runs.push_back({sizes[i], ks[j], &manifests[2 * c], &manifests[2 * c + 1], &infos[2 * c], &infos[2 * c + 1]});
  auto cells = consistency_grid(sizes, ks, runs, config.report.basis, config.report.discount);
  detail::write_file(out_dir / kGridTsvFile, grid_tsv(cells));
  write_json(out_dir / kGridJsonFile, grid_json(cells, config));
  write_run_record(out_dir, "run_sweep.json", "sweep", config, {train_features, test_features},
                   {out_dir / kGridTsvFile, out_dir / kGridJsonFile});
  return summary;
}

// --- command line -------------------------------------------------------------

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool print_config = false;
  std::vector<std::string> overrides;
};

void add_common(CLI::App *cmd, CommonFlags &flags) {
  cmd->add_option("--config", flags.config_path, "Key-value configuration file");
  cmd->add_option("--seed", flags.seed, "Seed for every stochastic step (overrides the config)");
  cmd->add_option("--out", flags.out_dir, "Output directory")->capture_default_str();
  cmd->add_flag("--print-config", flags.print_config, "Print the effective configuration and exit");
  cmd->add_option("--set", flags.overrides, "Override one config key: --set key=value");
}

RunConfig resolve_config(const CommonFlags &flags) {
  RunConfig config = flags.config_path.empty() ? RunConfig{} : RunConfig::load(flags.config_path);
  for (const auto &kv : flags.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw SpecError("--set expects key=value, got \"" + kv + "\"");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (flags.seed) config.seed = *flags.seed;
  return config;
}

void require(const std::string &value, const char *flag) {
  if (value.empty()) throw CLI::RequiredError(flag);
}

}  // namespace

int run(int argc, char **argv) {
  CLI::App app{"Unsupervised acoustic domain discovery with LDA", "lddisc"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto *synth_cmd = app.add_subcommand("synth", "Generate a synthetic multi-source corpus");
  add_common(synth_cmd, flags);

  std::string features, codebook, quantized, model;
  bool text_export = false;
  auto *cb_cmd = app.add_subcommand("train-codebook", "Train the acoustic-word codebook");
  add_common(cb_cmd, flags);
  cb_cmd->add_option("--features", features, "Feature file");
  cb_cmd->add_flag("--text", text_export, "Also write codebook.txt");

  auto *q_cmd = app.add_subcommand("quantize", "Map feature frames to acoustic words");
  add_common(q_cmd, flags);
  q_cmd->add_option("--features", features, "Feature file");
  q_cmd->add_option("--codebook", codebook, "Codebook file");

  auto *lda_cmd = app.add_subcommand("train-lda", "Estimate the domain model and the train manifest");
  add_common(lda_cmd, flags);
  lda_cmd->add_option("--quantized", quantized, "Quantized training corpus");

  auto *infer_cmd = app.add_subcommand("infer", "Assign domains to a quantized corpus");
  add_common(infer_cmd, flags);
  infer_cmd->add_option("--quantized", quantized, "Quantized corpus");
  infer_cmd->add_option("--model", model, "Model file");

  ReportInputs report_in;
  std::string train_manifest, test_manifest, train_corpus, test_corpus;
  auto *report_cmd = app.add_subcommand("report", "Label/domain tables and train/test divergence");
  add_common(report_cmd, flags);
  report_cmd->add_option("--train-manifest", train_manifest, "Training manifest");
  report_cmd->add_option("--test-manifest", test_manifest, "Test manifest");
  report_cmd->add_option("--train-corpus", train_corpus, "Labelled training corpus (feature or quantized)");
  report_cmd->add_option("--test-corpus", test_corpus, "Labelled test corpus (feature or quantized)");
  report_cmd->add_option("--codebook-size", report_in.codebook_size, "V recorded in the grid row");

  std::string sweep_train, sweep_test;
  auto *sweep_cmd = app.add_subcommand("sweep", "Run the codebook-size x domain-count grid");
  add_common(sweep_cmd, flags);
  sweep_cmd->add_option("--train", sweep_train, "Training feature file");
  sweep_cmd->add_option("--test", sweep_test, "Test feature file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config = resolve_config(flags);
    if (flags.print_config) {
      std::cout << config.to_text();
      return kExitOk;
    }
    const fs::path out = flags.out_dir;
    if (synth_cmd->parsed()) {
      for (const auto &p : cmd_synth(config, out)) std::cout << "wrote " << p.string() << "\n";
    } else if (cb_cmd->parsed()) {
      require(features, "--features");
      auto p = cmd_train_codebook(config, features, out, text_export);
      auto cb = read_codebook(p);
      std::cout << "wrote " << p.string() << " (V=" << cb.size() << ", distortion=" << number_text(cb.training_distortion())
                << ")\n";
    } else if (q_cmd->parsed()) {
      require(features, "--features");
      require(codebook, "--codebook");
      std::cout << "wrote " << cmd_quantize(config, features, codebook, out).string() << "\n";
    } else if (lda_cmd->parsed()) {
      require(quantized, "--quantized");
      std::cout << "wrote " << cmd_train_lda(config, quantized, out).string() << "\n";
    } else if (infer_cmd->parsed()) {
      require(quantized, "--quantized");
      require(model, "--model");
      std::cout << "wrote " << cmd_infer(config, quantized, model, out).string() << "\n";
    } else if (report_cmd->parsed()) {
      require(train_manifest, "--train-manifest");
      require(test_manifest, "--test-manifest");
      report_in.train_manifest = train_manifest;
      report_in.test_manifest = test_manifest;
      report_in.train_corpus = train_corpus;
      report_in.test_corpus = test_corpus;
      for (const auto &p : cmd_report(config, report_in, out)) std::cout << "wrote " << p.string() << "\n";
    } else if (sweep_cmd->parsed()) {
      require(sweep_train, "--train");
      require(sweep_test, "--test");
      auto s = cmd_sweep(config, sweep_train, sweep_test, out);
      std::cout << "sweep: " << s.cells_run << " cells run, " << s.cells_skipped << " skipped, "
                << s.cells_repaired << " repaired\n";
    }
    return kExitOk;
  } catch (const CLI::RequiredError &e) {
    std::cerr << "lddisc: missing required option " << e.what() << "\n";
    return kExitUsage;
  } catch (const SpecError &e) {
    std::cerr << "lddisc: configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError &e) {
    std::cerr << "lddisc: input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError &e) {
    std::cerr << "lddisc: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IoError &e) {
    std::cerr << "lddisc: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception &e) {
    std::cerr << "lddisc: input error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace lddisc::cli
