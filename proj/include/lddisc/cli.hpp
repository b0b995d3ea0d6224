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
#include <filesystem>
#include <string>
#include <vector>

#include "lddisc/config.hpp"

namespace lddisc::cli {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,      // bad command line or configuration
  kExitInput = 2,      // malformed or invalid input data
  kExitNumerical = 3,  // numerical failure during training or inference
  kExitIo = 4,         // file system errors
};

namespace fs = std::filesystem;

// File names written into --out directories.
inline constexpr const char *kFeaturesFile = "features.ldfc";
inline constexpr const char *kTrainFeaturesFile = "train.ldfc";
inline constexpr const char *kTestFeaturesFile = "test.ldfc";
inline constexpr const char *kCorpusFile = "corpus.ldqc";
inline constexpr const char *kTrainQuantizedFile = "train.ldqc";
inline constexpr const char *kTestQuantizedFile = "test.ldqc";
inline constexpr const char *kTruthFile = "truth.json";
inline constexpr const char *kCodebookFile = "codebook.ldcb";
inline constexpr const char *kModelFile = "model.ldam";
inline constexpr const char *kTrainManifestFile = "train_manifest.tsv";
inline constexpr const char *kTestManifestFile = "test_manifest.tsv";
inline constexpr const char *kRunFile = "run.json";
inline constexpr const char *kCellFile = "cell.json";
inline constexpr const char *kGridTsvFile = "grid.tsv";
inline constexpr const char *kGridJsonFile = "grid.json";

// Writes the synthetic corpus (all segments plus the train/test split when
// enabled) and a truth.json sidecar. Returns the written paths.
std::vector<fs::path> cmd_synth(const RunConfig &config, const fs::path &out_dir);

fs::path cmd_train_codebook(const RunConfig &config, const fs::path &features,
                            const fs::path &out_dir, bool text_export = false);

// Output is <out_dir>/<features stem>.ldqc.
fs::path cmd_quantize(const RunConfig &config, const fs::path &features,
                      const fs::path &codebook, const fs::path &out_dir);

// Writes model.ldam and train_manifest.tsv; returns the manifest path.
fs::path cmd_train_lda(const RunConfig &config, const fs::path &quantized,
                       const fs::path &out_dir);

// Output is <out_dir>/<quantized stem>_manifest.tsv.
fs::path cmd_infer(const RunConfig &config, const fs::path &quantized, const fs::path &model,
                   const fs::path &out_dir);

struct ReportInputs {
  fs::path train_manifest;
  fs::path test_manifest;
  fs::path train_corpus;  // optional; feature or quantized file
  fs::path test_corpus;   // optional
  std::size_t codebook_size = 0;  // grid row key; 0 = unknown
};

// Writes table_train/test.{tsv,json}, grid.{tsv,json} and kld.json.
std::vector<fs::path> cmd_report(const RunConfig &config, const ReportInputs &inputs,
                                 const fs::path &out_dir);

struct SweepSummary {
  std::size_t cells_run = 0;
  std::size_t cells_skipped = 0;
  std::size_t cells_repaired = 0;  // corrupt cells that were recomputed
};

// One directory V{V}_K{K} per configuration plus a consolidated grid.
// Completed cells whose fingerprints still match are skipped.
SweepSummary cmd_sweep(const RunConfig &config, const fs::path &train_features,
                       const fs::path &test_features, const fs::path &out_dir);

// Entry point of the `lddisc` executable.
int run(int argc, char **argv);

}  // namespace lddisc::cli
