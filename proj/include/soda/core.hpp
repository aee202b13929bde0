// Copyright 2026 The soda-ood Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Numeric building blocks shared by every stage of the pipeline: embedding
// storage, row normalization, cosine similarity and the run configuration.
//
// Storage is float32 (embedding files are float32); every reduction
// accumulates in double.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace soda {

/// N x D row-major matrix of float32 feature vectors, one row per sample.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Zero-filled matrix. Throws InvalidArgument if rows or cols is zero.
  EmbeddingMatrix(std::size_t rows, std::size_t cols);
  /// Takes ownership of `data`; throws LengthMismatch if the size is not
  /// rows * cols, NonFiniteEntry on NaN/Inf.
  EmbeddingMatrix(std::size_t rows, std::size_t cols, std::vector<float> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<float> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  float operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  float& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

/// Dense symmetric N x N cosine-similarity matrix with a unit diagonal.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(std::size_t n) : n_(n), data_(n * n, 0.0F) {}

  std::size_t size() const noexcept { return n_; }
  float operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  float& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  std::span<const float> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

  friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<float> data_;
};

/// Per-sample scores; `iteration` is the propagation step that produced them.
struct ScoreVector {
  std::vector<double> values;
  std::size_t iteration = 0;

  std::size_t size() const noexcept { return values.size(); }
};

enum class Mode { kZeroShot, kFull };

struct SodaConfig {
  double alpha = 0.2;   // anchor weight on the initial score
  double eta = 0.02;    // fraction of pairs admitted as graph edges
  std::size_t iters = 5;
  std::size_t topk = 10;
  Mode mode = Mode::kZeroShot;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument when a field is outside its domain.
  void validate() const;
};

/// Norm below which a row is treated as zero.
inline constexpr double kZeroNorm = 1e-12;

/// Returns a copy with every row scaled to unit Euclidean norm. Rows whose
/// norm is already within 1e-6 of one are copied verbatim, which makes the
/// operation exactly idempotent. Throws ZeroNormRow for a (near) zero row.
EmbeddingMatrix normalize_rows(const EmbeddingMatrix& m);

/// dot(a, b) / (|a| |b|) accumulated in double and clamped to [-1, 1].
double cosine_sim(std::span<const float> a, std::span<const float> b);
double cosine_sim(std::span<const double> a, std::span<const double> b);

/// Dot product of two rows accumulated in double, in index order.
double dot(std::span<const float> a, std::span<const float> b);

/// All-pairs cosine similarity. The upper triangle is computed and mirrored,
/// so the result is exactly symmetric; the diagonal is exactly 1.
SimilarityMatrix pairwise_similarity(const EmbeddingMatrix& m, unsigned threads = 0);

/// Resolves a requested worker count; 0 means all hardware threads.
unsigned resolve_threads(unsigned requested);

/// Runs fn(begin, end) over [0, n) split into contiguous static chunks. Each
/// index is handled by exactly one call, so per-index results do not depend
/// on the thread count.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace soda
