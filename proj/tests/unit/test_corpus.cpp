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
#include <map>
#include <set>

#include <doctest.h>

#include "lddisc/corpus.hpp"
#include "lddisc/error.hpp"
#include "lddisc/synth.hpp"

using namespace lddisc;

namespace {

QuantizedCorpus labelled(std::size_t per_label) {
  QuantizedCorpus c;
  c.vocab_size = 4;
  for (const char *label : {"A", "B", "C"})
    for (std::size_t i = 0; i < per_label; ++i)
      c.segments.push_back({std::string(label) + std::to_string(i), std::string(label), {0, 1}});
  return c;
}

}  // namespace

TEST_CASE("split is stratified, disjoint and order preserving") {
  auto c = labelled(11);
  auto [train, test] = split(c, 10.0 / 11.0, 9);
  CHECK(train.size() == 30);
  CHECK(test.size() == 3);
  std::map<std::string, int> test_per_label;
  for (const auto &s : test.segments) ++test_per_label[*s.label];
  for (const auto &[label, n] : test_per_label) CHECK(n == 1);
  std::set<std::string> ids;
  for (const auto &s : train.segments) ids.insert(s.id);
  for (const auto &s : test.segments) CHECK(ids.insert(s.id).second);
  auto position = [&](const std::string &id) {
    return std::find_if(c.segments.begin(), c.segments.end(), [&](auto &s) { return s.id == id; }) - c.segments.begin();
  };
  for (std::size_t i = 1; i < train.size(); ++i)
    CHECK(position(train.segments[i - 1].id) < position(train.segments[i].id));
}

TEST_CASE("split is a function of the seed") {
  auto c = labelled(20);
  CHECK(split(c, 0.5, 3) == split(c, 0.5, 3));
  CHECK(split(c, 0.5, 3).first != split(c, 0.5, 4).first);
}

TEST_CASE("every stratum keeps at least one segment on each side") {
  auto c = labelled(2);
  auto [train, test] = split(c, 0.99, 1);
  CHECK(train.size() == 3);
  CHECK(test.size() == 3);
}

TEST_CASE("gaussian synthesis is deterministic and labelled") {
  GaussianPreset p;
  p.num_sources = 3;
  p.segments_per_source = 4;
  p.frames_per_segment = 5;
  p.seed = 12;
  auto a = synthesize(make_gaussian_spec(p));
  auto b = synthesize(make_gaussian_spec(p));
  CHECK(a.corpus == b.corpus);
  CHECK(a.corpus.size() == 12);
  CHECK(a.corpus.total_frames() == 60);
  for (std::size_t m = 0; m < a.corpus.size(); ++m) CHECK(*a.corpus.segments[m].label == "S" + std::to_string(a.truth.source[m]));
}

TEST_CASE("lda synthesis produces valid topics") {
  LdaSynthSpec s;
  s.num_segments = 50;
  s.seed = 2;
  auto r = synthesize(s);
  CHECK(r.corpus.size() == 50);
  for (std::size_t k = 0; k < s.num_topics; ++k) {
    double total = 0.0;
    for (std::size_t v = 0; v < s.vocab_size; ++v) total += r.beta(v, k);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (const auto &seg : r.corpus.segments) CHECK(seg.words.size() == 100);
}
