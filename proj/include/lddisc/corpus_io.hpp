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

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "lddisc/corpus.hpp"

namespace lddisc {

// On-disk layouts. Binary files are little-endian:
//
//   feature file   "LDFC" | version u32 | M u32 | per segment:
//                  id_len u16, id | label_len u16, label | T u32 | n u32 |
//                  T*n float32
//   quantized file "LDQC" | version u32 | V u32 | M u32 | per segment:
//                  id_len u16, id | label_len u16, label | N u32 | N u32 ids
//
// A zero label length means "no label". The text forms start with a header
// line ("#LDFC 1 dim=<n>" or "#LDQC 1 V=<V>") followed by one segment per
// line: id TAB label TAB space-separated values. Feature text values use
// nine significant digits, which round-trips float32 exactly.
enum class FileFormat { binary, text };

inline constexpr std::uint32_t kFeatureFormatVersion = 1;
inline constexpr std::uint32_t kQuantizedFormatVersion = 1;

void write_features(const FeatureCorpus &corpus, std::ostream &out,
                    FileFormat format = FileFormat::binary);
void write_features(const FeatureCorpus &corpus, const std::filesystem::path &path,
                    FileFormat format = FileFormat::binary);
// Reads either form; the binary magic selects the binary parser.
FeatureCorpus read_features(std::istream &in);
FeatureCorpus read_features(const std::filesystem::path &path);

void write_quantized(const QuantizedCorpus &corpus, std::ostream &out,
                     FileFormat format = FileFormat::binary);
void write_quantized(const QuantizedCorpus &corpus, const std::filesystem::path &path,
                     FileFormat format = FileFormat::binary);
QuantizedCorpus read_quantized(std::istream &in);
QuantizedCorpus read_quantized(const std::filesystem::path &path);

}  // namespace lddisc
