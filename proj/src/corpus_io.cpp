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

#include "lddisc/corpus_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "binio.hpp"
#include "lddisc/error.hpp"

namespace lddisc {

namespace {

constexpr char kFeatureMagic[5] = "LDFC";
constexpr char kQuantizedMagic[5] = "LDQC";

std::string slurp(std::istream &in) {
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("stream read failure");
  return bytes;
}

void emit(std::ostream &out, const std::string &bytes) {
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("stream write failure");
}

std::uint32_t checked_u32(std::size_t n, const char *what) {
  if (n > 0xFFFFFFFFu) throw InputError(std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(n);
}

void check_text_field(const std::string &s, const char *what) {
  if (s.find_first_of("\t\n\r") != std::string::npos)
    throw InputError(std::string(what) + " \"" + s + "\" contains a tab or newline");
}

// Line-oriented reader for the text forms, tracking byte offsets.
class TextLines {
 public:
  explicit TextLines(std::string_view bytes) : bytes_(bytes) {}

  bool next(std::string_view &line, std::size_t &offset) {
    while (pos_ < bytes_.size()) {
      std::size_t end = bytes_.find('\n', pos_);
      if (end == std::string_view::npos) end = bytes_.size();
      offset = pos_;
      line = bytes_.substr(pos_, end - pos_);
      pos_ = end + 1;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) return true;
    }
    return false;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

struct TextRecord {
  std::string id;
  std::optional<std::string> label;
  std::string_view values;
};

TextRecord parse_record(std::string_view line, std::size_t offset) {
  auto t1 = line.find('\t');
  auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
  if (t2 == std::string_view::npos) throw FormatError("expected id TAB label TAB values", offset);
  TextRecord rec;
  rec.id = std::string(line.substr(0, t1));
  auto label = line.substr(t1 + 1, t2 - t1 - 1);
  if (!label.empty()) rec.label = std::string(label);
  rec.values = line.substr(t2 + 1);
  if (rec.id.empty()) throw FormatError("empty segment id", offset);
  return rec;
}

// Parses "#<magic> <version> <key>=<value>".
std::size_t parse_text_header(std::string_view line, const char *magic, const char *key) {
  std::istringstream hs{std::string(line)};
  std::string tag, kv;
  std::uint32_t version = 0;
  hs >> tag >> version >> kv;
  if (tag != std::string("#") + magic) throw FormatError("bad text header", 0);
  if (version != 1) throw FormatError("unsupported text format version " + std::to_string(version), 0);
  std::string prefix = std::string(key) + "=";
  if (kv.rfind(prefix, 0) != 0) throw FormatError(std::string("text header lacks ") + key, 0);
  std::size_t value = 0;
  auto s = kv.substr(prefix.size());
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || p != s.data() + s.size()) throw FormatError("bad header value", 0);
  return value;
}

template <typename F>
void for_each_token(std::string_view values, std::size_t base_offset, F &&f) {
  std::size_t i = 0;
  while (i < values.size()) {
    while (i < values.size() && values[i] == ' ') ++i;
    if (i == values.size()) break;
    std::size_t j = values.find(' ', i);
    if (j == std::string_view::npos) j = values.size();
    f(values.substr(i, j - i), base_offset + i);
    i = j;
  }
}

void check_unique(std::unordered_set<std::string> &seen, const std::string &id, std::size_t offset) {
  if (!seen.insert(id).second) throw FormatError("duplicate segment id \"" + id + "\"", offset);
}

// --- features -----------------------------------------------------------------

FeatureCorpus read_features_binary(std::string_view bytes) {
  detail::ByteReader r(bytes, "feature file");
  r.expect_magic(kFeatureMagic);
  auto version_at = r.offset();
  auto version = r.get<std::uint32_t>();
  if (version != kFeatureFormatVersion)
    r.fail("unsupported version " + std::to_string(version), version_at);
  auto count = r.get<std::uint32_t>();
  if (count == 0) r.fail("segment count is zero");
  FeatureCorpus corpus;
  std::unordered_set<std::string> seen;
  corpus.segments.reserve(count);
  for (std::uint32_t m = 0; m < count; ++m) {
    FeatureSegment seg;
    auto id_at = r.offset();
    seg.id = r.get_short_string();
    if (seg.id.empty()) r.fail("empty segment id", id_at);
    check_unique(seen, seg.id, id_at);
    auto label = r.get_short_string();
    if (!label.empty()) seg.label = std::move(label);
    auto t_at = r.offset();
    auto frames = r.get<std::uint32_t>();
    auto dim_at = r.offset();
    auto dim = r.get<std::uint32_t>();
    if (frames == 0) r.fail("segment \"" + seg.id + "\" has no frames", t_at);
    if (dim == 0) r.fail("dimension is zero", dim_at);
    if (corpus.dim == 0) corpus.dim = dim;
    if (dim != corpus.dim)
      r.fail("dimension mismatch: " + std::to_string(dim) + " vs " + std::to_string(corpus.dim), dim_at);
    std::size_t n = static_cast<std::size_t>(frames) * dim;
    if (r.remaining() / sizeof(float) < n) r.fail("truncated frame data");
    seg.dim = dim;
    seg.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto at = r.offset();
      float v = r.get<float>();
      if (!std::isfinite(v)) r.fail("non-finite value in segment \"" + seg.id + "\"", at);
      seg.values[i] = v;
    }
    corpus.segments.push_back(std::move(seg));
  }
  if (!r.at_end()) r.fail("trailing bytes after last segment");
  return corpus;
}

FeatureCorpus read_features_text(std::string_view bytes) {
  TextLines lines(bytes);
  std::string_view line;
  std::size_t offset = 0;
  if (!lines.next(line, offset)) throw FormatError("empty feature text file", 0);
  FeatureCorpus corpus;
  corpus.dim = parse_text_header(line, kFeatureMagic, "dim");
  if (corpus.dim == 0) throw FormatError("dimension is zero", offset);
  std::unordered_set<std::string> seen;
  while (lines.next(line, offset)) {
    auto rec = parse_record(line, offset);
    check_unique(seen, rec.id, offset);
    FeatureSegment seg{rec.id, rec.label, corpus.dim, {}};
    std::size_t values_at = offset + static_cast<std::size_t>(rec.values.data() - line.data());
    for_each_token(rec.values, values_at, [&](std::string_view tok, std::size_t at) {
      float v = 0.0f;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || p != tok.data() + tok.size())
        throw FormatError("bad value \"" + std::string(tok) + "\"", at);
      if (!std::isfinite(v)) throw FormatError("non-finite value", at);
      seg.values.push_back(v);
    });
    if (seg.values.empty()) throw FormatError("segment \"" + seg.id + "\" has no frames", offset);
    if (seg.values.size() % corpus.dim != 0)
      throw FormatError("segment \"" + seg.id + "\": value count not a multiple of dim", offset);
    corpus.segments.push_back(std::move(seg));
  }
  if (corpus.segments.empty()) throw FormatError("no segments", bytes.size());
  return corpus;
}

std::string float_text(float v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  return buf;
}

// --- quantized ----------------------------------------------------------------

QuantizedCorpus read_quantized_binary(std::string_view bytes) {
  detail::ByteReader r(bytes, "quantized file");
  r.expect_magic(kQuantizedMagic);
  auto version_at = r.offset();
  auto version = r.get<std::uint32_t>();
  if (version != kQuantizedFormatVersion)
    r.fail("unsupported version " + std::to_string(version), version_at);
  QuantizedCorpus corpus;
  auto vocab_at = r.offset();
  corpus.vocab_size = r.get<std::uint32_t>();
  if (corpus.vocab_size == 0) r.fail("vocabulary size is zero", vocab_at);
  auto count = r.get<std::uint32_t>();
  if (count == 0) r.fail("segment count is zero");
  std::unordered_set<std::string> seen;
  corpus.segments.reserve(count);
  for (std::uint32_t m = 0; m < count; ++m) {
    QuantizedSegment seg;
    auto id_at = r.offset();
    seg.id = r.get_short_string();
    if (seg.id.empty()) r.fail("empty segment id", id_at);
    check_unique(seen, seg.id, id_at);
    auto label = r.get_short_string();
    if (!label.empty()) seg.label = std::move(label);
    auto n_at = r.offset();
    auto n = r.get<std::uint32_t>();
    if (n == 0) r.fail("segment \"" + seg.id + "\" has no words", n_at);
    if (r.remaining() / sizeof(std::uint32_t) < n) r.fail("truncated word data");
    seg.words.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      auto at = r.offset();
      auto w = r.get<std::uint32_t>();
      if (w >= corpus.vocab_size)
        r.fail("word id " + std::to_string(w) + " >= V=" + std::to_string(corpus.vocab_size), at);
      seg.words[i] = w;
    }
    corpus.segments.push_back(std::move(seg));
  }
  if (!r.at_end()) r.fail("trailing bytes after last segment");
  return corpus;
}

QuantizedCorpus read_quantized_text(std::string_view bytes) {
  TextLines lines(bytes);
  std::string_view line;
  std::size_t offset = 0;
  if (!lines.next(line, offset)) throw FormatError("empty quantized text file", 0);
  QuantizedCorpus corpus;
  corpus.vocab_size = parse_text_header(line, kQuantizedMagic, "V");
  if (corpus.vocab_size == 0) throw FormatError("vocabulary size is zero", offset);
  std::unordered_set<std::string> seen;
  while (lines.next(line, offset)) {
    auto rec = parse_record(line, offset);
    check_unique(seen, rec.id, offset);
    QuantizedSegment seg{rec.id, rec.label, {}};
    std::size_t values_at = offset + static_cast<std::size_t>(rec.values.data() - line.data());
    for_each_token(rec.values, values_at, [&](std::string_view tok, std::size_t at) {
      std::uint32_t w = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), w);
      if (ec != std::errc() || p != tok.data() + tok.size())
        throw FormatError("bad word id \"" + std::string(tok) + "\"", at);
      if (w >= corpus.vocab_size)
        throw FormatError("word id " + std::to_string(w) + " >= V=" + std::to_string(corpus.vocab_size), at);
      seg.words.push_back(w);
    });
    if (seg.words.empty()) throw FormatError("segment \"" + seg.id + "\" has no words", offset);
    corpus.segments.push_back(std::move(seg));
  }
  if (corpus.segments.empty()) throw FormatError("no segments", bytes.size());
  return corpus;
}

}  // namespace

void write_features(const FeatureCorpus &corpus, std::ostream &out, FileFormat format) {
  corpus.validate();
  if (format == FileFormat::text) {
    std::string text = "#LDFC 1 dim=" + std::to_string(corpus.dim) + "\n";
    for (const auto &seg : corpus.segments) {
      check_text_field(seg.id, "segment id");
      check_text_field(seg.label.value_or(""), "label");
      text += seg.id;
      text += '\t';
      text += seg.label.value_or("");
      text += '\t';
      for (std::size_t i = 0; i < seg.values.size(); ++i) {
        if (i) text += ' ';
        text += float_text(seg.values[i]);
      }
      text += '\n';
    }
    emit(out, text);
    return;
  }
  detail::ByteWriter w;
  w.put_magic(kFeatureMagic);
  w.put(kFeatureFormatVersion);
  w.put(checked_u32(corpus.segments.size(), "segment count"));
  for (const auto &seg : corpus.segments) {
    if (seg.label && seg.label->empty()) throw InputError("empty label string is reserved for \"no label\"");
    w.put_short_string(seg.id);
    w.put_short_string(seg.label.value_or(""));
    w.put(checked_u32(seg.num_frames(), "frame count"));
    w.put(checked_u32(seg.dim, "dimension"));
    for (float v : seg.values) w.put(v);
  }
  emit(out, w.bytes());
}

void write_features(const FeatureCorpus &corpus, const std::filesystem::path &path, FileFormat format) {
  std::ostringstream os;
  write_features(corpus, os, format);
  detail::write_file(path, os.str());
}

FeatureCorpus read_features(std::istream &in) {
  std::string bytes = slurp(in);
  if (bytes.rfind(kFeatureMagic, 0) == 0) return read_features_binary(bytes);
  if (bytes.rfind(std::string("#") + kFeatureMagic, 0) == 0) return read_features_text(bytes);
  throw FormatError("not a feature file (bad magic)", 0);
}

FeatureCorpus read_features(const std::filesystem::path &path) {
  std::string bytes = detail::read_file(path);
  std::istringstream in(bytes);
  return read_features(in);
}

void write_quantized(const QuantizedCorpus &corpus, std::ostream &out, FileFormat format) {
  corpus.validate();
  if (format == FileFormat::text) {
    std::string text = "#LDQC 1 V=" + std::to_string(corpus.vocab_size) + "\n";
    for (const auto &seg : corpus.segments) {
      check_text_field(seg.id, "segment id");
      check_text_field(seg.label.value_or(""), "label");
      text += seg.id;
      text += '\t';
      text += seg.label.value_or("");
      text += '\t';
      for (std::size_t i = 0; i < seg.words.size(); ++i) {
        if (i) text += ' ';
        text += std::to_string(seg.words[i]);
      }
      text += '\n';
    }
    emit(out, text);
    return;
  }
  detail::ByteWriter w;
  w.put_magic(kQuantizedMagic);
  w.put(kQuantizedFormatVersion);
  w.put(checked_u32(corpus.vocab_size, "vocabulary size"));
  w.put(checked_u32(corpus.segments.size(), "segment count"));
  for (const auto &seg : corpus.segments) {
    if (seg.label && seg.label->empty()) throw InputError("empty label string is reserved for \"no label\"");
    w.put_short_string(seg.id);
    w.put_short_string(seg.label.value_or(""));
    w.put(checked_u32(seg.words.size(), "word count"));
    for (auto id : seg.words) w.put(id);
  }
  emit(out, w.bytes());
}

void write_quantized(const QuantizedCorpus &corpus, const std::filesystem::path &path,
                     FileFormat format) {
  std::ostringstream os;
  write_quantized(corpus, os, format);
  detail::write_file(path, os.str());
}

QuantizedCorpus read_quantized(std::istream &in) {
  std::string bytes = slurp(in);
  if (bytes.rfind(kQuantizedMagic, 0) == 0) return read_quantized_binary(bytes);
  if (bytes.rfind(std::string("#") + kQuantizedMagic, 0) == 0) return read_quantized_text(bytes);
  throw FormatError("not a quantized file (bad magic)", 0);
}

QuantizedCorpus read_quantized(const std::filesystem::path &path) {
  std::string bytes = detail::read_file(path);
  std::istringstream in(bytes);
  return read_quantized(in);
}

}  // namespace lddisc
