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

#include "soda/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/core.h>

#include "soda/error.hpp"
#include "soda/io.hpp"

namespace soda {

SimilarityGraph SimilarityGraph::from_adjacency(std::vector<std::vector<std::uint32_t>> adjacency,
                                                double epsilon) {
  SimilarityGraph g;
  g.epsilon_ = epsilon;
  g.offsets_.reserve(adjacency.size() + 1);
  g.offsets_.push_back(0);
  for (std::size_t i = 0; i < adjacency.size(); ++i) {
    auto& list = adjacency[i];
    for (const auto j : list) {
      if (j >= adjacency.size()) {
        throw Error(ErrorCode::kInvalidArgument, fmt::format("node {} links to {} of {}", i, j, adjacency.size()));
      }
    }
    list.push_back(static_cast<std::uint32_t>(i));
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    g.indices_.insert(g.indices_.end(), list.begin(), list.end());
    g.offsets_.push_back(g.indices_.size());
  }
  return g;
}

SimilarityGraph SimilarityGraph::self_loops(std::size_t n) {
  return from_adjacency(std::vector<std::vector<std::uint32_t>>(n), 1.0);
}

std::size_t SimilarityGraph::edge_count() const {
  std::size_t twice = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (const auto j : neighbors(i)) twice += (j != i) ? 1 : 0;
  }
  return twice / 2;
}

bool SimilarityGraph::is_symmetric() const {
  for (std::size_t i = 0; i < size(); ++i) {
    for (const auto j : neighbors(i)) {
      const auto back = neighbors(j);
      if (!std::binary_search(back.begin(), back.end(), static_cast<std::uint32_t>(i))) return false;
    }
  }
  return true;
}

bool SimilarityGraph::has_all_self_loops() const {
  for (std::size_t i = 0; i < size(); ++i) {
    const auto nb = neighbors(i);
    if (!std::binary_search(nb.begin(), nb.end(), static_cast<std::uint32_t>(i))) return false;
  }
  return true;
}

std::size_t percentile_rank(std::size_t m, double eta) {
  if (m == 0) throw Error(ErrorCode::kTooFewSamples, "no pairs to take a percentile of");
  if (!(eta > 0.0 && eta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("eta must be in (0, 1), got {}", eta));
  }
  // (1 - eta) * m can land a few ulps above an integer (eta = 1/3, m = 3
  // gives 2.0000000000000004); such a product is treated as that integer.
  const double exact = (1.0 - eta) * static_cast<double>(m);
  const double tol = 1e-9 * std::max(1.0, exact);
  auto rank = static_cast<std::size_t>(std::ceil(exact - tol));
  return std::clamp<std::size_t>(rank, 1, m);
}

double percentile_threshold(const SimilarityMatrix& sims, double eta) {
  const std::size_t n = sims.size();
  if (n < 2) throw Error(ErrorCode::kTooFewSamples, fmt::format("need at least 2 samples, got {}", n));
  const std::size_t m = n * (n - 1) / 2;
  const std::size_t rank = percentile_rank(m, eta);
  std::vector<float> upper;
  upper.reserve(m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = sims.row(i);
    upper.insert(upper.end(), row.begin() + static_cast<std::ptrdiff_t>(i) + 1, row.end());
  }
  const auto nth = upper.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(upper.begin(), nth, upper.end());
  return *nth;
}

SimilarityGraph build_graph(const SimilarityMatrix& sims, double eta, unsigned threads) {
  const std::size_t n = sims.size();
  const auto epsilon = static_cast<float>(percentile_threshold(sims, eta));

  std::vector<std::size_t> degree(n, 0);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = sims.row(i);
      std::size_t d = 1;
      for (std::size_t j = 0; j < n; ++j) d += (j != i && row[j] >= epsilon) ? 1 : 0;
      degree[i] = d;
    }
  });

  SimilarityGraph g;
  g.epsilon_ = epsilon;
  g.offsets_.resize(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
  g.indices_.resize(g.offsets_[n]);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = sims.row(i);
      std::size_t out = g.offsets_[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || row[j] >= epsilon) g.indices_[out++] = static_cast<std::uint32_t>(j);
      }
    }
  });
  return g;
}

void dump_graph(const SimilarityGraph& graph, const std::filesystem::path& edges_path,
                const std::filesystem::path& epsilon_path) {
  std::ofstream edges(edges_path, std::ios::binary | std::ios::trunc);
  if (!edges) throw Error(ErrorCode::kIoFailure, fmt::format("cannot write {}", edges_path.string()));
  edges << "i,j\n";
  for (std::size_t i = 0; i < graph.size(); ++i) {
    for (const auto j : graph.neighbors(i)) {
      if (j > i) edges << i << ',' << j << '\n';
    }
  }
  std::ofstream eps(epsilon_path, std::ios::binary | std::ios::trunc);
  if (!eps) throw Error(ErrorCode::kIoFailure, fmt::format("cannot write {}", epsilon_path.string()));
  eps << "epsilon=" << io::format_real(graph.epsilon()) << '\n';
  if (!edges || !eps) throw Error(ErrorCode::kIoFailure, "graph dump failed");
}

}  // namespace soda
