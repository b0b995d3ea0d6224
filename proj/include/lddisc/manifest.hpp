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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lddisc/corpus.hpp"
#include "lddisc/lda.hpp"

namespace lddisc {

struct ManifestEntry {
  std::string segment_id;
  std::size_t domain = 0;
  std::optional<std::string> label;
  std::vector<double> gamma;

  friend bool operator==(const ManifestEntry &, const ManifestEntry &) = default;
};

// Segment -> hidden domain assignment handed to downstream adaptation.
struct DomainManifest {
  std::size_t num_domains = 0;
  std::string model_fingerprint;
  std::string metadata_json = "{}";  // run configuration echo
  std::vector<ManifestEntry> entries;

  // Throws InputError on duplicate ids, wrong gamma length, or a domain that
  // is not the (lowest-index) argmax of its gamma.
  void validate() const;
  friend bool operator==(const DomainManifest &, const DomainManifest &) = default;
};

DomainManifest make_manifest(const QuantizedCorpus &corpus,
                             const std::vector<SegmentPosterior> &posteriors,
                             std::string model_fingerprint,
                             std::string metadata_json = "{}");

// TSV: a first line "#" followed by a JSON header, then one line per segment:
// segment_id TAB domain TAB label TAB gamma_0 TAB ... TAB gamma_{K-1}.
// Gamma values are printed with 17 significant digits.
void write_manifest(const DomainManifest &manifest, std::ostream &out);
void write_manifest(const DomainManifest &manifest, const std::filesystem::path &path);
DomainManifest read_manifest(std::istream &in);
DomainManifest read_manifest(const std::filesystem::path &path);

}  // namespace lddisc
