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

#include "soda/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/core.h>

#include "soda/error.hpp"

namespace soda {

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0F) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("embedding matrix must be non-empty, got {}x{}", rows, cols));
  }
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("embedding matrix must be non-empty, got {}x{}", rows, cols));
  }
  if (data_.size() != rows * cols) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} values for a {}x{} matrix", data_.size(), rows, cols));
  }
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!std::isfinite(data_[k])) {
      throw Error(ErrorCode::kNonFiniteEntry,
                  fmt::format("row {} col {}", k / cols, k % cols));
    }
  }
}

void SodaConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("alpha must be in (0, 1], got {}", alpha));
  }
  if (!(eta > 0.0 && eta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("eta must be in (0, 1), got {}", eta));
  }
  if (topk == 0) {
    throw Error(ErrorCode::kInvalidArgument, "topk must be positive");
  }
}

EmbeddingMatrix normalize_rows(const EmbeddingMatrix& m) {
  EmbeddingMatrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = out.row(i);
    const double norm = std::sqrt(dot(row, row));
    if (norm < kZeroNorm) {
      throw Error(ErrorCode::kZeroNormRow, fmt::format("row {}", i));
    }
    if (std::abs(norm - 1.0) <= 1e-6) continue;
    for (float& v : row) v = static_cast<float>(static_cast<double>(v) / norm);
  }
  return out;
}

double dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    acc += static_cast<double>(a[k]) * static_cast<double>(b[k]);
  }
  return acc;
}

namespace {

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, fmt::format("{} vs {}", a.size(), b.size()));
  }
  double ab = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double x = a[k];
    const double y = b[k];
    ab += x * y;
    aa += x * x;
    bb += y * y;
  }
  const double na = std::sqrt(aa);
  const double nb = std::sqrt(bb);
  if (na < kZeroNorm || nb < kZeroNorm) {
    throw Error(ErrorCode::kZeroNormRow, "cosine similarity of a zero vector");
  }
  return std::clamp(ab / (na * nb), -1.0, 1.0);
}

}  // namespace

double cosine_sim(std::span<const float> a, std::span<const float> b) {
  return cosine_impl(a, b);
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  return cosine_impl(a, b);
}

SimilarityMatrix pairwise_similarity(const EmbeddingMatrix& m, unsigned threads) {
  const EmbeddingMatrix unit = normalize_rows(m);
  const std::size_t n = unit.rows();
  SimilarityMatrix sims(n);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      sims(i, i) = 1.0F;
      const auto zi = unit.row(i);
      for (std::size_t j = i + 1; j < n; ++j) {
        sims(i, j) = static_cast<float>(std::clamp(dot(zi, unit.row(j)), -1.0, 1.0));
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) sims(j, i) = sims(i, j);
  }
  return sims;
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), n);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  // Small chunks handed out dynamically; the triangular similarity loop has
  // very uneven per-row cost.
  const std::size_t chunk = std::max<std::size_t>(1, n / (workers * 16));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(chunk);
        if (begin >= n) break;
        fn(begin, std::min(n, begin + chunk));
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace soda
