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

#include "lddisc/manifest.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "binio.hpp"
#include "lddisc/error.hpp"

namespace lddisc {

using nlohmann::json;

void DomainManifest::validate() const {
  if (num_domains == 0) throw InputError("manifest: K must be at least 1");
  std::unordered_set<std::string> seen;
  for (const auto &e : entries) {
    if (!seen.insert(e.segment_id).second) throw InputError("manifest: duplicate segment id " + e.segment_id);
    if (e.gamma.size() != num_domains)
      throw InputError("manifest: segment " + e.segment_id + " has " + std::to_string(e.gamma.size()) +
                       " gamma values, expected " + std::to_string(num_domains));
    if (e.domain != assign_domain(e.gamma))
      throw InputError("manifest: segment " + e.segment_id + " domain is not the argmax of gamma");
  }
}

DomainManifest make_manifest(const QuantizedCorpus &corpus,
                             const std::vector<SegmentPosterior> &posteriors,
                             std::string model_fingerprint, std::string metadata_json) {
  if (posteriors.size() != corpus.segments.size())
    throw InputError("make_manifest: posterior count differs from segment count");
  if (posteriors.empty()) throw InputError("make_manifest: no segments");
  DomainManifest manifest;
  manifest.num_domains = posteriors.front().gamma.size();
  manifest.model_fingerprint = std::move(model_fingerprint);
  manifest.metadata_json = std::move(metadata_json);
  for (std::size_t m = 0; m < posteriors.size(); ++m) {
    const auto &seg = corpus.segments[m];
    manifest.entries.push_back({seg.id, assign_domain(posteriors[m]), seg.label, posteriors[m].gamma});
  }
  manifest.validate();
  return manifest;
}

void write_manifest(const DomainManifest &manifest, std::ostream &out) {
  manifest.validate();
  json header = {{"format", "lddisc-manifest"},
                 {"version", 1},
                 {"num_domains", manifest.num_domains},
                 {"model_fingerprint", manifest.model_fingerprint},
                 {"segments", manifest.entries.size()},
                 {"metadata", json::parse(manifest.metadata_json)}};
  std::string text = "#" + header.dump() + "\n";
  char buf[40];
  for (const auto &e : manifest.entries) {
    if (e.segment_id.find_first_of("\t\n\r") != std::string::npos ||
        e.label.value_or("").find_first_of("\t\n\r") != std::string::npos)
      throw InputError("manifest: id or label contains a tab or newline");
    text += e.segment_id;
    text += '\t';
    text += std::to_string(e.domain);
    text += '\t';
    text += e.label.value_or("");
    for (double g : e.gamma) {
      std::snprintf(buf, sizeof(buf), "\t%.17g", g);
      text += buf;
    }
    text += '\n';
  }
  out << text;
  if (!out) throw IoError("manifest write failure");
}

void write_manifest(const DomainManifest &manifest, const std::filesystem::path &path) {
  std::ostringstream os;
  write_manifest(manifest, os);
  detail::write_file(path, os.str());
}

DomainManifest read_manifest(std::istream &in) {
  std::string line;
  std::size_t offset = 0;
  if (!std::getline(in, line) || line.empty() || line[0] != '#')
    throw FormatError("manifest: missing '#' JSON header line", 0);
  DomainManifest manifest;
  try {
    auto header = json::parse(line.substr(1));
    if (header.at("format") != "lddisc-manifest") throw FormatError("manifest: unknown format", 1);
    manifest.num_domains = header.at("num_domains").get<std::size_t>();
    manifest.model_fingerprint = header.at("model_fingerprint").get<std::string>();
    manifest.metadata_json = header.contains("metadata") ? header["metadata"].dump() : "{}";
  } catch (const json::exception &e) {
    throw FormatError(std::string("manifest: bad header: ") + e.what(), 1);
  }
  offset += line.size() + 1;
  while (std::getline(in, line)) {
    const std::size_t line_at = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (fields.size() != 3 + manifest.num_domains)
      throw FormatError("manifest: expected " + std::to_string(3 + manifest.num_domains) + " fields", line_at);
    ManifestEntry e;
    e.segment_id = std::string(fields[0]);
    auto [p, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), e.domain);
    if (ec != std::errc() || p != fields[1].data() + fields[1].size())
      throw FormatError("manifest: bad domain id", line_at);
    if (!fields[2].empty()) e.label = std::string(fields[2]);
    for (std::size_t k = 0; k < manifest.num_domains; ++k) {
      auto f = fields[3 + k];
      double g = 0.0;
      auto [q, ec2] = std::from_chars(f.data(), f.data() + f.size(), g);
      if (ec2 != std::errc() || q != f.data() + f.size()) throw FormatError("manifest: bad gamma value", line_at);
      e.gamma.push_back(g);
    }
    manifest.entries.push_back(std::move(e));
  }
  try {
    manifest.validate();
  } catch (const InputError &e) {
    throw FormatError(e.what(), 0);
  }
  return manifest;
}

DomainManifest read_manifest(const std::filesystem::path &path) {
  std::istringstream in(detail::read_file(path));
  return read_manifest(in);
}

}  // namespace lddisc
