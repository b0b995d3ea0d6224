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

#include "lddisc/metrics.hpp"

#include <cmath>
#include <map>

#include "lddisc/assignment.hpp"
#include "lddisc/error.hpp"

namespace lddisc {

const char *to_string(MassBasis basis) { return basis == MassBasis::frames ? "frames" : "segments"; }

MassBasis parse_mass_basis(const std::string &name) {
  if (name == "frames") return MassBasis::frames;
  if (name == "segments") return MassBasis::segments;
  throw InputError("unknown mass basis \"" + name + "\" (expected frames or segments)");
}

namespace {

double entry_mass(const ManifestEntry &e, MassBasis basis, const SegmentInfoMap *info) {
  if (basis == MassBasis::segments) return 1.0;
  if (!info) throw InputError("frames basis needs segment lengths");
  auto it = info->find(e.segment_id);
  if (it == info->end()) throw InputError("segment " + e.segment_id + " is not in the corpus");
  return static_cast<double>(it->second.length);
}

}  // namespace

DomainDistribution domain_distribution(const DomainManifest &manifest, std::size_t num_domains,
                                       MassBasis basis, const SegmentInfoMap *info) {
  if (manifest.entries.empty()) throw InputError("domain_distribution: empty manifest");
  if (num_domains == 0) throw InputError("domain_distribution: K must be at least 1");
  DomainDistribution dist{std::vector<double>(num_domains, 0.0), basis};
  for (const auto &e : manifest.entries) {
    if (e.domain >= num_domains)
      throw InputError("domain_distribution: segment " + e.segment_id + " has domain " +
                       std::to_string(e.domain) + " >= K=" + std::to_string(num_domains));
    dist.counts[e.domain] += entry_mass(e, basis, info);
  }
  return dist;
}

LabelDomainTable label_domain_table(const DomainManifest &manifest, const SegmentInfoMap &info,
                                    MassBasis basis) {
  if (manifest.entries.empty()) throw InputError("label_domain_table: empty manifest");
  const std::size_t K = manifest.num_domains;
  std::map<std::string, std::size_t> row_of;
  std::vector<std::vector<double>> rows;
  LabelDomainTable table;
  table.num_domains = K;
  table.basis = basis;
  for (const auto &e : manifest.entries) {
    auto it = info.find(e.segment_id);
    if (it == info.end()) throw InputError("label_domain_table: segment " + e.segment_id + " is not in the corpus");
    if (!it->second.label) throw InputError("label_domain_table: segment " + e.segment_id + " is unlabelled");
    if (e.domain >= K) throw InputError("label_domain_table: domain id out of range");
    auto [pos, inserted] = row_of.try_emplace(*it->second.label, rows.size());
    if (inserted) {
      table.labels.push_back(*it->second.label);
      rows.emplace_back(K, 0.0);
    }
    rows[pos->second][e.domain] += entry_mass(e, basis, &info);
  }
  table.cells = Matrix(rows.size(), K);
  table.row_totals.assign(rows.size(), 0.0);
  table.col_totals.assign(K, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t k = 0; k < K; ++k) {
      table.cells(r, k) = rows[r][k];
      table.row_totals[r] += rows[r][k];
      table.col_totals[k] += rows[r][k];
    }
  for (double t : table.row_totals) table.total += t;
  return table;
}

std::vector<double> smooth(std::span<const double> counts, double discount) {
  if (!(discount >= 0.0 && discount < 1.0)) throw InputError("smooth: discount must lie in [0, 1)");
  if (counts.empty()) throw InputError("smooth: empty distribution");
  double total = 0.0;
  std::size_t zeros = 0;
  for (double c : counts) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InputError("smooth: counts must be finite and non-negative");
    total += c;
    if (c == 0.0) ++zeros;
  }
  if (!(total > 0.0)) throw InputError("smooth: all-zero distribution");
  std::vector<double> p(counts.size());
  const double keep = zeros == 0 ? 1.0 : 1.0 - discount;
  const double share = zeros == 0 ? 0.0 : discount / static_cast<double>(zeros);
  for (std::size_t i = 0; i < counts.size(); ++i)
    p[i] = counts[i] == 0.0 ? share : counts[i] / total * keep;
  return p;
}

std::vector<double> smooth(const DomainDistribution &distribution, double discount) {
  return smooth(distribution.counts, discount);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InputError("kl_divergence: length mismatch");
  if (p.empty()) throw InputError("kl_divergence: empty distributions");
  double p_total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(q[i] > 0.0)) throw InputError("kl_divergence: Q has a zero or negative entry; smooth it first");
    if (!(p[i] >= 0.0)) throw InputError("kl_divergence: P has a negative entry");
    p_total += p[i];
  }
  if (std::abs(p_total - 1.0) > 1e-9) throw InputError("kl_divergence: P does not sum to 1");
  double kld = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) kld += p[i] * std::log(p[i] / q[i]);
  return kld;
}

std::vector<GridCell> consistency_grid(std::span<const std::size_t> codebook_sizes,
                                       std::span<const std::size_t> domain_counts,
                                       std::span<const GridRun> runs, MassBasis basis,
                                       double discount) {
  if (codebook_sizes.empty() || domain_counts.empty()) throw InputError("consistency_grid: empty grid");
  std::vector<GridCell> cells;
  for (auto v : codebook_sizes)
    for (auto k : domain_counts) {
      const GridRun *run = nullptr;
      for (const auto &r : runs)
        if (r.codebook_size == v && r.num_domains == k) run = &r;
      if (!run || !run->train || !run->test)
        throw InputError("consistency_grid: missing cell V=" + std::to_string(v) + " K=" + std::to_string(k));
      GridCell cell;
      cell.codebook_size = v;
      cell.num_domains = k;
      cell.train_distribution = smooth(domain_distribution(*run->train, k, basis, run->train_info), discount);
      cell.test_distribution = smooth(domain_distribution(*run->test, k, basis, run->test_info), discount);
      cell.kld = kl_divergence(cell.train_distribution, cell.test_distribution);
      cells.push_back(std::move(cell));
    }
  return cells;
}

TopicMatch match_topics(const Matrix &estimated, const Matrix &truth) {
  if (estimated.rows() != truth.rows() || estimated.cols() != truth.cols())
    throw InputError("match_topics: shape mismatch");
  const std::size_t V = truth.rows(), K = truth.cols();
  if (K == 0) throw InputError("match_topics: no topics");
  auto norms = [&](const Matrix &m) {
    std::vector<double> out(K, 0.0);
    for (std::size_t i = 0; i < V; ++i)
      for (std::size_t k = 0; k < K; ++k) out[k] += m(i, k) * m(i, k);
    for (double &x : out) x = std::sqrt(x);
    return out;
  };
  auto ne = norms(estimated), nt = norms(truth);
  // score[true j][estimated c]
  std::vector<double> score(K * K, 0.0);
  for (std::size_t j = 0; j < K; ++j)
    for (std::size_t c = 0; c < K; ++c) {
      double dot = 0.0;
      for (std::size_t i = 0; i < V; ++i) dot += truth(i, j) * estimated(i, c);
      double denom = nt[j] * ne[c];
      score[j * K + c] = denom > 0.0 ? dot / denom : 0.0;
    }
  TopicMatch match;
  if (K <= kMaxOptimalMatch) {
    std::vector<double> cost(score.size());
    for (std::size_t i = 0; i < score.size(); ++i) cost[i] = -score[i];
    match.permutation = hungarian_min_cost(cost, K);
  } else {
    match.permutation = greedy_max_score(score, K);
  }
  double total = 0.0;
  for (std::size_t j = 0; j < K; ++j) total += score[j * K + match.permutation[j]];
  match.mean_cosine = total / static_cast<double>(K);
  return match;
}

}  // namespace lddisc
