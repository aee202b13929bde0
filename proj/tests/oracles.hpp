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

// Deliberately naive reference implementations used as test oracles. Nothing
// here calls into the library except for plain data types.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "soda/core.hpp"
#include "soda/io.hpp"
#include "soda/synth.hpp"

namespace soda::testing {

inline double naive_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  return ab / std::sqrt(aa * bb);
}

inline std::vector<double> row_of(const EmbeddingMatrix& m, std::size_t i) {
  std::vector<double> v(m.cols());
  for (std::size_t k = 0; k < m.cols(); ++k) v[k] = m(i, k);
  return v;
}

/// Full N x N cosine matrix, every entry computed independently.
inline std::vector<std::vector<double>> naive_similarity(const EmbeddingMatrix& m) {
  std::vector<std::vector<double>> s(m.rows(), std::vector<double>(m.rows()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.rows(); ++j) s[i][j] = naive_cosine(row_of(m, i), row_of(m, j));
  }
  return s;
}

struct NaiveGraph {
  double epsilon = 0.0;
  std::vector<std::set<std::uint32_t>> neighbors;
};

/// Sorts every unordered pair, takes the smallest rank r with r / M >= 1 - eta
/// and links pairs at or above that value.
template <typename Sims>
NaiveGraph naive_graph(const Sims& sims, std::size_t n, double eta) {
  std::vector<double> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back(sims(i, j));
  }
  std::sort(pairs.begin(), pairs.end());
  const std::size_t m = pairs.size();
  std::size_t rank = 1;
  while (rank < m && static_cast<double>(rank) / static_cast<double>(m) < (1.0 - eta) - 1e-12) ++rank;
  NaiveGraph g;
  g.epsilon = pairs[rank - 1];
  g.neighbors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.neighbors[i].insert(static_cast<std::uint32_t>(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && sims(i, j) >= g.epsilon) g.neighbors[i].insert(static_cast<std::uint32_t>(j));
    }
  }
  return g;
}

/// Counts correctly ordered (ID, OOD) pairs; ties count one half.
inline double brute_auc(const std::vector<double>& s, const std::vector<io::OodLabel>& y) {
  double twice = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != io::OodLabel::kId) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != io::OodLabel::kOod) continue;
      pairs += 1;
      twice += s[i] > s[j] ? 2 : (s[i] == s[j] ? 1 : 0);
    }
  }
  return twice / (2 * pairs);
}

/// Tries every attained score as a threshold and keeps the largest one that
/// retains at least `recall` of the ID samples.
inline double brute_fpr(const std::vector<double>& s, const std::vector<io::OodLabel>& y, double recall) {
  double n_id = 0, n_ood = 0;
  for (auto l : y) (l == io::OodLabel::kId ? n_id : n_ood) += 1;
  double best_tau = -INFINITY;
  for (const double tau : s) {
    double kept = 0;
    for (std::size_t i = 0; i < s.size(); ++i) kept += (y[i] == io::OodLabel::kId && s[i] >= tau) ? 1 : 0;
    if (kept / n_id >= recall - 1e-12 && tau > best_tau) best_tau = tau;
  }
  double fp = 0;
  for (std::size_t i = 0; i < s.size(); ++i) fp += (y[i] == io::OodLabel::kOod && s[i] >= best_tau) ? 1 : 0;
  return fp / n_ood;
}

/// One synchronous update per step over explicit neighbor sets.
inline std::vector<double> naive_propagate(const std::vector<double>& s0,
                                           const std::vector<std::set<std::uint32_t>>& nb,
                                           double alpha, std::size_t iters) {
  std::vector<double> cur = s0;
  for (std::size_t t = 0; t < iters; ++t) {
    std::vector<double> next(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) {
      double sum = 0;
      for (auto j : nb[i]) sum += cur[j];
      next[i] = alpha * s0[i] + (1 - alpha) * sum / static_cast<double>(nb[i].size());
    }
    cur = next;
  }
  return cur;
}

/// Gaussian elimination with partial pivoting on (I - (1 - alpha) D^-1 A) x = alpha s0.
inline std::vector<double> gauss_fixed_point(const std::vector<double>& s0,
                                             const std::vector<std::set<std::uint32_t>>& nb,
                                             double alpha) {
  const std::size_t n = s0.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = 1.0;
    for (auto j : nb[i]) a[i][j] -= (1 - alpha) / static_cast<double>(nb[i].size());
    a[i][n] = alpha * s0[i];
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[c], a[p]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
  return x;
}

/// Random neighbor sets: symmetric, self-loops, each pair linked with
/// probability p.
inline std::vector<std::set<std::uint32_t>> random_neighbors(std::size_t n, double p,
                                                             synth::Xoshiro256& rng) {
  std::vector<std::set<std::uint32_t>> nb(n);
  for (std::size_t i = 0; i < n; ++i) {
    nb[i].insert(static_cast<std::uint32_t>(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < p) {
        nb[i].insert(static_cast<std::uint32_t>(j));
        nb[j].insert(static_cast<std::uint32_t>(i));
      }
    }
  }
  return nb;
}

inline std::vector<std::vector<std::uint32_t>> as_lists(const std::vector<std::set<std::uint32_t>>& nb) {
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto& s : nb) out.emplace_back(s.begin(), s.end());
  return out;
}

inline EmbeddingMatrix random_matrix(std::size_t rows, std::size_t cols, synth::Xoshiro256& rng) {
  EmbeddingMatrix m(rows, cols);
  for (float& v : m.data()) v = static_cast<float>(rng.normal());
  return m;
}

inline std::vector<double> random_scores(std::size_t n, synth::Xoshiro256& rng) {
  std::vector<double> s(n);
  for (double& v : s) v = 2.0 * rng.uniform() - 1.0;
  return s;
}

}  // namespace soda::testing
