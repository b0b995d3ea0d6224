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
#include <span>
#include <vector>

namespace lddisc {

// Minimum-cost perfect assignment on a square cost matrix (row-major, n x n).
// Returns column[r] for every row r.
std::vector<std::size_t> hungarian_min_cost(std::span<const double> cost, std::size_t n);

// Greedy maximum-score assignment: repeatedly take the largest remaining
// entry, lowest (row, col) on ties.
std::vector<std::size_t> greedy_max_score(std::span<const double> score, std::size_t n);

}  // namespace lddisc
