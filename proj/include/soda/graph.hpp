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

// Percentile-thresholded similarity graph over the test set.
//
// The threshold is the nearest-rank percentile 100(1 - eta) of the distinct
// pairwise similarities (strict upper triangle). Samples i != j are joined
// when their similarity is >= the threshold, so dense regions get more
// neighbors than sparse ones. Every node carries a self-loop.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "soda/core.hpp"

namespace soda {

/// Symmetric adjacency in compressed sparse row form. Neighbor lists are
/// sorted ascending and include the node itself.
class SimilarityGraph {
 public:
  SimilarityGraph() = default;

  /// Builds from explicit neighbor lists. Lists are sorted and deduplicated;
  /// a missing self-loop is added. Symmetry is the caller's responsibility
  /// (see is_symmetric).
  static SimilarityGraph from_adjacency(std::vector<std::vector<std::uint32_t>> adjacency,
                                        double epsilon = 0.0);

  /// n isolated nodes, each with only its self-loop.
  static SimilarityGraph self_loops(std::size_t n);

  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {indices_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  double epsilon() const noexcept { return epsilon_; }

  /// Undirected edges between distinct nodes (self-loops not counted).
  std::size_t edge_count() const;
  bool is_symmetric() const;
  bool has_all_self_loops() const;

  friend bool operator==(const SimilarityGraph&, const SimilarityGraph&) = default;

 private:
  friend SimilarityGraph build_graph(const SimilarityMatrix&, double, unsigned);

  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> indices_;
  double epsilon_ = 0.0;
};

/// 1-based nearest rank ceil((1 - eta) * m), clamped to [1, m].
std::size_t percentile_rank(std::size_t m, double eta);

/// Threshold value: the percentile_rank-th smallest strict-upper-triangle
/// similarity. Throws TooFewSamples when N < 2.
double percentile_threshold(const SimilarityMatrix& sims, double eta);

SimilarityGraph build_graph(const SimilarityMatrix& sims, double eta, unsigned threads = 0);

/// Writes `i,j` rows for i < j (no self-loops) to `edges_path` and a single
/// `epsilon=<value>` line to `epsilon_path`.
void dump_graph(const SimilarityGraph& graph, const std::filesystem::path& edges_path,
                const std::filesystem::path& epsilon_path);

}  // namespace soda
