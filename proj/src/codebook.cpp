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

#include "lddisc/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "binio.hpp"
#include "lddisc/error.hpp"

namespace lddisc {

namespace {

constexpr char kCodebookMagic[5] = "LDCB";

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

// Squared distance with partial-distance early exit: once the running sum
// reaches `bound` the candidate cannot win (ties keep the earlier index), so
// the caller only needs to know it lost.
template <typename T>
inline double partial_sq_dist(const double *z, const T *m, std::size_t dim, double bound) {
  double acc = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    double diff = z[d] - static_cast<double>(m[d]);
    acc += diff * diff;
    if (acc >= bound) return acc;
  }
  return acc;
}

template <typename T>
std::pair<std::uint32_t, double> nearest_mean(const double *z, const T *means, std::size_t count,
                                              std::size_t dim) {
  std::uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < count; ++j) {
    double d = partial_sq_dist(z, means + j * dim, dim, best_d);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::uint32_t>(j);
    }
  }
  return {best, best_d};
}

// Nearest mean for every row of `z`. Distances are screened in blocks as
// |z|^2 + |m|^2 - 2 z.m, then every candidate within a rounding margin of the
// screened minimum is rescored exactly in index order, so the result equals
// the linear scan of nearest_mean.
void nearest_batch(const double *z, std::size_t n, const double *means, std::size_t k, std::size_t dim,
                   std::uint32_t *index, double *sqdist) {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> m(means, static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(dim));
  const Eigen::VectorXd mnorm = m.rowwise().squaredNorm();
  const double mmax = mnorm.maxCoeff();
  constexpr std::size_t kBlock = 128;
  const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>((n + kBlock - 1) / kBlock);
#pragma omp parallel
  {
    RowMat scores;
#pragma omp for schedule(static)
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
      const std::size_t rows = std::min(kBlock, n - lo);
      Eigen::Map<const RowMat> x(z + lo * dim, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
      scores.noalias() = x * m.transpose();
      for (std::size_t r = 0; r < rows; ++r) {
        const double *zr = z + (lo + r) * dim;
        const double xnorm = x.row(static_cast<Eigen::Index>(r)).squaredNorm();
        const double *sr = scores.data() + r * k;
        double screened = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) screened = std::min(screened, mnorm[j] - 2.0 * sr[j]);
        const double margin = 1e-9 * (xnorm + mmax) + 1e-300;
        std::uint32_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
          if (mnorm[j] - 2.0 * sr[j] > screened + margin) continue;
          double d = partial_sq_dist(zr, means + j * dim, dim, best_d);
          if (d < best_d) {
            best_d = d;
            best = static_cast<std::uint32_t>(j);
          }
        }
        index[lo + r] = best;
        sqdist[lo + r] = best_d;
      }
    }
  }
}

// Principal axis of every cluster scaled by its standard deviation; empty
// when the cluster has no spread. The sign makes the largest-magnitude
// component positive.
std::vector<std::vector<double>> principal_axes(const std::vector<double> &data,
                                                const std::vector<std::uint32_t> &assign,
                                                const std::vector<double> &means, std::size_t k,
                                                std::size_t dim) {
  std::vector<Eigen::MatrixXd> scatter(k, Eigen::MatrixXd::Zero(dim, dim));
  std::vector<std::size_t> count(k, 0);
  Eigen::VectorXd c(dim);
  for (std::size_t i = 0; i < assign.size(); ++i) {
    const std::size_t j = assign[i];
    for (std::size_t d = 0; d < dim; ++d) c[d] = data[i * dim + d] - means[j * dim + d];
    scatter[j].selfadjointView<Eigen::Lower>().rankUpdate(c);
    ++count[j];
  }
  std::vector<std::vector<double>> axes(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (count[j] < 2) continue;
    Eigen::MatrixXd cov = scatter[j].selfadjointView<Eigen::Lower>();
    cov /= static_cast<double>(count[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const double lambda = eig.eigenvalues()[static_cast<Eigen::Index>(dim) - 1];
    if (!(lambda > 0.0)) continue;
    Eigen::VectorXd u = eig.eigenvectors().col(static_cast<Eigen::Index>(dim) - 1);
    Eigen::Index top = 0;
    u.cwiseAbs().maxCoeff(&top);
    if (u[top] < 0.0) u = -u;
    u *= std::sqrt(lambda);
    axes[j].assign(u.data(), u.data() + dim);
  }
  return axes;
}

// Hard-assignment EM on normalized data at a fixed codebook size.
class LevelEm {
 public:
  LevelEm(const std::vector<double> &data, std::size_t n, std::size_t dim)
      : data_(data), n_(n), dim_(dim), assign_(n), dist_(n) {}

  const std::vector<std::uint32_t> &assignments() const { return assign_; }

  void run(std::vector<double> &means, const VqTrainConfig &config, VqLevelTrace &trace) {
    const std::size_t k = means.size() / dim_;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < config.em_iters_per_level; ++it) {
      assign(means, k);
      trace.reseeded += reseed_empty(k);
      double total = 0.0;
      for (std::size_t i = 0; i < n_; ++i) total += dist_[i];
      double d = total / static_cast<double>(n_);
      trace.distortion.push_back(d);
      update_means(means, k);
      if (d == 0.0) break;
      if (std::isfinite(prev) && (prev - d) <= config.convergence_tol * prev) break;
      prev = d;
    }
  }

 private:
  void assign(const std::vector<double> &means, std::size_t k) {
    nearest_batch(data_.data(), n_, means.data(), k, dim_, assign_.data(), dist_.data());
  }

  // Moves the farthest frame (from a cluster with more than one member) into
  // each empty cluster, in cluster order. Returns the number repaired.
  std::size_t reseed_empty(std::size_t k) {
    counts_.assign(k, 0);
    for (auto j : assign_) ++counts_[j];
    std::size_t repaired = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (counts_[j] != 0) continue;
      std::size_t pick = n_;
      for (std::size_t i = 0; i < n_; ++i) {
        if (counts_[assign_[i]] < 2) continue;
        if (pick == n_ || dist_[i] > dist_[pick]) pick = i;
      }
      if (pick == n_) break;  // unreachable while n >= k
      --counts_[assign_[pick]];
      assign_[pick] = static_cast<std::uint32_t>(j);
      dist_[pick] = 0.0;
      counts_[j] = 1;
      ++repaired;
    }
    return repaired;
  }

  void update_means(std::vector<double> &means, std::size_t k) {
    std::fill(means.begin(), means.end(), 0.0);
    counts_.assign(k, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      double *m = means.data() + assign_[i] * dim_;
      const double *x = data_.data() + i * dim_;
      for (std::size_t d = 0; d < dim_; ++d) m[d] += x[d];
      ++counts_[assign_[i]];
    }
    for (std::size_t j = 0; j < k; ++j) {
      double inv = 1.0 / static_cast<double>(counts_[j]);
      for (std::size_t d = 0; d < dim_; ++d) means[j * dim_ + d] *= inv;
    }
  }

  const std::vector<double> &data_;
  std::size_t n_, dim_;
  std::vector<std::uint32_t> assign_;
  std::vector<double> dist_;
  std::vector<std::size_t> counts_;
};

}  // namespace

void VqTrainConfig::validate() const {
  if (!is_power_of_two(target_size)) throw InputError("codebook size must be a power of two");
  if (em_iters_per_level == 0) throw InputError("em_iters_per_level must be at least 1");
  if (!(split_epsilon > 0.0)) throw InputError("split_epsilon must be positive");
  if (!(convergence_tol > 0.0)) throw InputError("convergence_tol must be positive");
}

Codebook::Codebook(std::size_t dim, std::vector<float> means, std::vector<double> offset,
                   std::vector<double> scale, bool normalized, double training_distortion)
    : dim_(dim),
      means_(std::move(means)),
      offset_(std::move(offset)),
      scale_(std::move(scale)),
      normalized_(normalized),
      training_distortion_(training_distortion) {
  if (dim_ == 0 || means_.empty() || means_.size() % dim_ != 0)
    throw InputError("codebook: means do not match the dimension");
  if (offset_.size() != dim_ || scale_.size() != dim_)
    throw InputError("codebook: normalization vectors do not match the dimension");
  for (float m : means_)
    if (!std::isfinite(m)) throw InputError("codebook: non-finite mean");
  for (std::size_t d = 0; d < dim_; ++d)
    if (!std::isfinite(offset_[d]) || !(scale_[d] > 0.0) || !std::isfinite(scale_[d]))
      throw InputError("codebook: invalid normalization");
}

void Codebook::normalize(std::span<const float> frame, std::span<double> z) const {
  for (std::size_t d = 0; d < dim_; ++d) z[d] = (static_cast<double>(frame[d]) - offset_[d]) / scale_[d];
}

std::pair<std::uint32_t, double> Codebook::nearest(std::span<const double> z) const {
  return nearest_mean(z.data(), means_.data(), size(), dim_);
}

VqTrainResult train_codebook(std::span<const float> frames, std::size_t dim,
                             const VqTrainConfig &config) {
  config.validate();
  if (dim == 0) throw InputError("train_codebook: dimension must be at least 1");
  if (frames.size() % dim != 0) throw InputError("train_codebook: frame buffer is not a multiple of dim");
  const std::size_t n = frames.size() / dim;
  if (n < config.target_size)
    throw InsufficientDataError("train_codebook: " + std::to_string(n) + " frames for a codebook of " +
                                std::to_string(config.target_size));

  // Normalization statistics (population moments).
  std::vector<double> offset(dim, 0.0), scale(dim, 1.0);
  if (config.normalize) {
    std::vector<double> sum(dim, 0.0), sq(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < dim; ++d) sum[d] += frames[i * dim + d];
    for (std::size_t d = 0; d < dim; ++d) offset[d] = sum[d] / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < dim; ++d) {
        double c = frames[i * dim + d] - offset[d];
        sq[d] += c * c;
      }
    for (std::size_t d = 0; d < dim; ++d) {
      double sd = std::sqrt(sq[d] / static_cast<double>(n));
      scale[d] = sd > 0.0 ? sd : 1.0;
    }
  }

  std::vector<double> data(n * dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d)
      data[i * dim + d] = (static_cast<double>(frames[i * dim + d]) - offset[d]) / scale[d];

  // Per-dimension spread of the working data, used for the split perturbation.
  std::vector<double> mean(dim, 0.0), spread(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d) mean[d] += data[i * dim + d];
  for (double &m : mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d) {
      double c = data[i * dim + d] - mean[d];
      spread[d] += c * c;
    }
  for (double &s : spread) s = std::sqrt(s / static_cast<double>(n));

  VqTrainResult result;
  LevelEm em(data, n, dim);
  std::vector<double> means = mean;
  for (;;) {
    const std::size_t k = means.size() / dim;
    VqLevelTrace trace;
    trace.size = k;
    em.run(means, config, trace);
    result.levels.push_back(std::move(trace));
    if (k == config.target_size) break;
    // Each mean moves by +/- split_epsilon times its cluster's principal
    // standard deviation along the principal axis; clusters without spread
    // fall back to the global per-dimension spread.
    std::vector<double> split(2 * k * dim);
    auto axes = principal_axes(data, em.assignments(), means, k, dim);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t d = 0; d < dim; ++d) {
        double delta = config.split_epsilon * (axes.empty() || axes[j].empty() ? spread[d] : axes[j][d]);
        split[(2 * j) * dim + d] = means[j * dim + d] + delta;
        split[(2 * j + 1) * dim + d] = means[j * dim + d] - delta;
      }
    means = std::move(split);
  }

  std::vector<float> stored(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    stored[i] = static_cast<float>(means[i]);
    if (!std::isfinite(stored[i])) throw NumericalError("train_codebook: non-finite mean");
  }

  // Final hard assignment against the stored (float32) means.
  std::vector<double> widened(stored.begin(), stored.end());
  std::vector<double> sqdist(n);
  result.assignments.resize(n);
  nearest_batch(data.data(), n, widened.data(), widened.size() / dim, dim, result.assignments.data(),
                sqdist.data());
  double total = 0.0;
  for (double d : sqdist) total += d;
  result.codebook = Codebook(dim, std::move(stored), std::move(offset), std::move(scale),
                             config.normalize, total / static_cast<double>(n));
  return result;
}

VqTrainResult train_codebook(const FeatureCorpus &corpus, const VqTrainConfig &config) {
  corpus.validate();
  auto frames = pool_frames(corpus);
  return train_codebook(frames, corpus.dim, config);
}

std::uint32_t quantize_frame(std::span<const float> frame, const Codebook &codebook) {
  if (frame.size() != codebook.dim())
    throw InputError("quantize_frame: frame dimension " + std::to_string(frame.size()) +
                     " does not match codebook dimension " + std::to_string(codebook.dim()));
  std::vector<double> z(codebook.dim());
  codebook.normalize(frame, z);
  return codebook.nearest(z).first;
}

QuantizedCorpus quantize_corpus(const FeatureCorpus &corpus, const Codebook &codebook) {
  corpus.validate();
  if (corpus.dim != codebook.dim())
    throw InputError("quantize_corpus: corpus dimension " + std::to_string(corpus.dim) +
                     " does not match codebook dimension " + std::to_string(codebook.dim()));
  const std::size_t dim = codebook.dim();
  std::vector<double> widened(codebook.means().begin(), codebook.means().end());
  QuantizedCorpus out;
  out.vocab_size = codebook.size();
  out.segments.resize(corpus.segments.size());
  std::vector<double> z;
  std::vector<double> sqdist;
  for (std::size_t m = 0; m < corpus.segments.size(); ++m) {
    const auto &seg = corpus.segments[m];
    auto &q = out.segments[m];
    q.id = seg.id;
    q.label = seg.label;
    const std::size_t frames = seg.num_frames();
    z.resize(frames * dim);
    sqdist.resize(frames);
    q.words.resize(frames);
    for (std::size_t t = 0; t < frames; ++t) codebook.normalize(seg.frame(t), {z.data() + t * dim, dim});
    nearest_batch(z.data(), frames, widened.data(), codebook.size(), dim, q.words.data(), sqdist.data());
  }
  return out;
}

double distortion(const FeatureCorpus &corpus, const Codebook &codebook) {
  if (corpus.segments.empty()) throw InputError("distortion: empty corpus");
  corpus.validate();
  if (corpus.dim != codebook.dim()) throw InputError("distortion: dimension mismatch");
  double total = 0.0;
  std::size_t count = 0;
  std::vector<double> z(codebook.dim());
  for (const auto &seg : corpus.segments)
    for (std::size_t t = 0; t < seg.num_frames(); ++t) {
      codebook.normalize(seg.frame(t), z);
      total += codebook.nearest(z).second;
      ++count;
    }
  return total / static_cast<double>(count);
}

void write_codebook(const Codebook &codebook, std::ostream &out, const std::string &metadata_json) {
  detail::ByteWriter w;
  w.put_magic(kCodebookMagic);
  w.put(kCodebookFormatVersion);
  w.put(static_cast<std::uint32_t>(codebook.size()));
  w.put(static_cast<std::uint32_t>(codebook.dim()));
  for (float m : codebook.means()) w.put(m);
  w.put(codebook.training_distortion());
  w.put(static_cast<std::uint32_t>(codebook.normalized() ? 1 : 0));
  for (double o : codebook.offset()) w.put(o);
  for (double s : codebook.scale()) w.put(s);
  w.put(static_cast<std::uint32_t>(metadata_json.size()));
  w.put_raw(metadata_json);
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw IoError("codebook write failure");
}

void write_codebook(const Codebook &codebook, const std::filesystem::path &path,
                    const std::string &metadata_json) {
  std::ostringstream os;
  write_codebook(codebook, os, metadata_json);
  detail::write_file(path, os.str());
}

Codebook read_codebook(std::istream &in, std::string *metadata_json) {
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  detail::ByteReader r(bytes, "codebook file");
  r.expect_magic(kCodebookMagic);
  auto version_at = r.offset();
  if (auto v = r.get<std::uint32_t>(); v != kCodebookFormatVersion)
    r.fail("unsupported version " + std::to_string(v), version_at);
  auto size_at = r.offset();
  auto size = r.get<std::uint32_t>();
  auto dim = r.get<std::uint32_t>();
  if (size == 0 || dim == 0) r.fail("empty codebook", size_at);
  std::size_t count = static_cast<std::size_t>(size) * dim;
  if (r.remaining() / sizeof(float) < count) r.fail("truncated means");
  std::vector<float> means(count);
  for (auto &m : means) {
    auto at = r.offset();
    m = r.get<float>();
    if (!std::isfinite(m)) r.fail("non-finite mean", at);
  }
  double training_distortion = r.get<double>();
  auto normalized = r.get<std::uint32_t>();
  std::vector<double> offset(dim), scale(dim);
  for (auto &o : offset) o = r.get<double>();
  for (auto &s : scale) {
    auto at = r.offset();
    s = r.get<double>();
    if (!(s > 0.0) || !std::isfinite(s)) r.fail("invalid normalization scale", at);
  }
  auto meta_len = r.get<std::uint32_t>();
  auto meta = r.get_raw(meta_len);
  if (!r.at_end()) r.fail("trailing bytes");
  if (metadata_json) *metadata_json = std::string(meta);
  return Codebook(dim, std::move(means), std::move(offset), std::move(scale), normalized != 0,
                  training_distortion);
}

Codebook read_codebook(const std::filesystem::path &path, std::string *metadata_json) {
  std::istringstream in(detail::read_file(path));
  return read_codebook(in, metadata_json);
}

void write_codebook_text(const Codebook &codebook, std::ostream &out) {
  char buf[32];
  for (std::size_t j = 0; j < codebook.size(); ++j) {
    auto m = codebook.mean(j);
    for (std::size_t d = 0; d < m.size(); ++d) {
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(m[d]));
      if (d) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace lddisc
