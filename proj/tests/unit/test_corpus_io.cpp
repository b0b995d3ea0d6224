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

#include <filesystem>
#include <sstream>

#include <doctest.h>

#include "lddisc/corpus_io.hpp"
#include "lddisc/error.hpp"
#include "lddisc/synth.hpp"

using namespace lddisc;

namespace {

FeatureCorpus sample_features() {
  FeatureCorpus c;
  c.dim = 3;
  c.segments.push_back({"a", std::string("spk1"), 3, {1.0f, 2.5f, -3.25f, 1e-7f, 0.1f, 3.4028235e38f}});
  c.segments.push_back({"b", std::nullopt, 3, {0.0f, -0.0f, 7.0f}});
  return c;
}

QuantizedCorpus sample_quantized() {
  QuantizedCorpus c;
  c.vocab_size = 10;
  c.segments.push_back({"x", std::string("L"), {0, 9, 9, 3}});
  c.segments.push_back({"y", std::nullopt, {5}});
  return c;
}

}  // namespace

TEST_CASE("feature corpus round trips in both formats") {
  for (auto format : {FileFormat::binary, FileFormat::text}) {
    std::stringstream ss;
    write_features(sample_features(), ss, format);
    CHECK(read_features(ss) == sample_features());
  }
}

TEST_CASE("quantized corpus round trips in both formats") {
  for (auto format : {FileFormat::binary, FileFormat::text}) {
    std::stringstream ss;
    write_quantized(sample_quantized(), ss, format);
    CHECK(read_quantized(ss) == sample_quantized());
  }
}

TEST_CASE("synthetic corpus round trips through a file") {
  GaussianPreset p;
  p.num_sources = 2;
  p.segments_per_source = 3;
  p.frames_per_segment = 7;
  auto corpus = synthesize(make_gaussian_spec(p)).corpus;
  auto path = std::filesystem::temp_directory_path() / "lddisc_unit_roundtrip.ldfc";
  write_features(corpus, path);
  CHECK(read_features(path) == corpus);
  std::filesystem::remove(path);
}

TEST_CASE("truncated binary input reports a byte offset") {
  std::stringstream ss;
  write_features(sample_features(), ss);
  std::string bytes = ss.str();
  for (std::size_t cut : {std::size_t{2}, std::size_t{9}, bytes.size() - 3}) {
    std::istringstream in(bytes.substr(0, cut));
    CAPTURE(cut);
    try {
      read_features(in);
      FAIL("expected a format error");
    } catch (const FormatError &e) {
      CHECK(e.byte_offset() <= cut);
    }
  }
}

TEST_CASE("bad magic and mismatched kinds are rejected") {
  std::istringstream junk("NOPE1234");
  CHECK_THROWS_AS(read_features(junk), FormatError);
  std::stringstream ss;
  write_quantized(sample_quantized(), ss);
  CHECK_THROWS_AS(read_features(ss), FormatError);
}

TEST_CASE("out-of-range words and duplicate ids are invalid") {
  auto q = sample_quantized();
  q.segments[0].words[0] = 10;
  std::stringstream ss;
  CHECK_THROWS_AS(write_quantized(q, ss), InputError);
  auto f = sample_features();
  f.segments[1].id = "a";
  CHECK_THROWS_AS(f.validate(), InputError);
}

TEST_CASE("text form rejects ragged frames") {
  std::istringstream in("#LDFC 1 dim=2\nseg\tL\t1 2 3\n");
  CHECK_THROWS_AS(read_features(in), FormatError);
}

TEST_CASE("missing file is an I/O error") {
  CHECK_THROWS_AS(read_features(std::filesystem::path("/nonexistent/lddisc.ldfc")), IoError);
}
