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

// Neighborhood score propagation.
//
// Each step replaces a node's score by
//
//   s_t[i] = alpha * s_0[i] + (1 - alpha) / |N(i)| * sum_{j in N(i)} s_{t-1}[j]
//
// where N(i) includes i itself. Updates are synchronous: step t reads only
// the iterate of step t-1. The map is an affine contraction with factor
// (1 - alpha) in the max norm, so iterates converge geometrically to the
// unique fixed point s* = alpha (I - (1 - alpha) D^-1 A)^-1 s_0.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "soda/core.hpp"
#include "soda/graph.hpp"

namespace soda {

/// Iterates s_0..s_T and the max-norm step sizes between them.
struct PropagationTrace {
  std::vector<std::vector<double>> iterates;
  /// delta_inf[t - 1] = max_i |s_t[i] - s_{t-1}[i]| for t = 1..T.
  std::vector<double> delta_inf;

  std::size_t iterations() const noexcept { return iterates.empty() ? 0 : iterates.size() - 1; }
  const std::vector<double>& initial() const { return iterates.front(); }
  const std::vector<double>& last() const { return iterates.back(); }
  ScoreVector final_scores() const { return {iterates.back(), iterations()}; }
};

struct PropagateOptions {
  unsigned threads = 0;
  /// Stop once a step moves no score by more than this. 0 disables, so the
  /// trace always has exactly the requested number of iterations.
  double early_stop_tol = 0.0;
};

PropagationTrace propagate(std::span<const double> s0, const SimilarityGraph& graph, double alpha,
                           std::size_t iters, const PropagateOptions& options = {});

/// Fixed point of the propagation map by dense LU factorization.
ScoreVector solve_fixed_point(std::span<const double> s0, const SimilarityGraph& graph,
                              double alpha);

/// Final combined score d_src^(T) * s_text^(T). Both traces must come from
/// the same graph, alpha and T.
ScoreVector soda_combine(const PropagationTrace& s_text, const PropagationTrace& d_src);

/// Per-iteration products d_src^(t) * s_text^(t), t = 0..T, for inspection.
PropagationTrace combine_traces(const PropagationTrace& s_text, const PropagationTrace& d_src);

}  // namespace soda
