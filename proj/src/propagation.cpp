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

#include "soda/propagation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "soda/error.hpp"

namespace soda {

namespace {

void check_inputs(std::span<const double> s0, const SimilarityGraph& graph, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("alpha must be in (0, 1], got {}", alpha));
  }
  if (s0.size() != graph.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} scores for a graph of {} nodes", s0.size(), graph.size()));
  }
  for (std::size_t i = 0; i < s0.size(); ++i) {
    if (!std::isfinite(s0[i])) throw Error(ErrorCode::kNonFiniteScore, fmt::format("initial score {}", i));
    if (graph.degree(i) == 0) throw Error(ErrorCode::kEmptyNeighborhood, fmt::format("node {}", i));
  }
}

}  // namespace

PropagationTrace propagate(std::span<const double> s0, const SimilarityGraph& graph, double alpha,
                           std::size_t iters, const PropagateOptions& options) {
  check_inputs(s0, graph, alpha);
  const std::size_t n = s0.size();
  PropagationTrace trace;
  trace.iterates.reserve(iters + 1);
  trace.iterates.emplace_back(s0.begin(), s0.end());
  trace.delta_inf.reserve(iters);

  const double keep = 1.0 - alpha;
  for (std::size_t t = 1; t <= iters; ++t) {
    const std::vector<double>& prev = trace.iterates.back();
    std::vector<double> next(n);
    if (alpha == 1.0) {
      // The neighbor term vanishes; copying keeps -0.0 and friends intact.
      next.assign(s0.begin(), s0.end());
    } else {
      parallel_for(n, options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          const auto nb = graph.neighbors(i);
          double sum = 0.0;
          for (const auto j : nb) sum += prev[j];
          next[i] = alpha * s0[i] + keep / static_cast<double>(nb.size()) * sum;
        }
      });
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(next[i])) {
        throw Error(ErrorCode::kNonFiniteScore, fmt::format("node {} at iteration {}", i, t));
      }
      delta = std::max(delta, std::abs(next[i] - prev[i]));
    }
    trace.iterates.push_back(std::move(next));
    trace.delta_inf.push_back(delta);
    if (options.early_stop_tol > 0.0 && delta < options.early_stop_tol) break;
  }
  return trace;
}

ScoreVector solve_fixed_point(std::span<const double> s0, const SimilarityGraph& graph,
                              double alpha) {
  check_inputs(s0, graph, alpha);
  const auto n = static_cast<Eigen::Index>(s0.size());
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto nb = graph.neighbors(static_cast<std::size_t>(i));
    const double w = (1.0 - alpha) / static_cast<double>(nb.size());
    for (const auto j : nb) system(i, static_cast<Eigen::Index>(j)) -= w;
  }
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) rhs(i) = alpha * s0[static_cast<std::size_t>(i)];
  const Eigen::VectorXd x = system.partialPivLu().solve(rhs);

  ScoreVector out;
  out.values.assign(x.data(), x.data() + n);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (!std::isfinite(out.values[i])) throw Error(ErrorCode::kNonFiniteScore, fmt::format("fixed point {}", i));
  }
  return out;
}

namespace {

void check_compatible(const PropagationTrace& a, const PropagationTrace& b) {
  if (a.iterates.empty() || b.iterates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty propagation trace");
  }
  if (a.iterations() != b.iterations()) {
    throw Error(ErrorCode::kIterationMismatch,
                fmt::format("{} vs {} iterations", a.iterations(), b.iterations()));
  }
  if (a.last().size() != b.last().size()) {
    throw Error(ErrorCode::kLengthMismatch, fmt::format("{} vs {} samples", a.last().size(), b.last().size()));
  }
}

}  // namespace

ScoreVector soda_combine(const PropagationTrace& s_text, const PropagationTrace& d_src) {
  check_compatible(s_text, d_src);
  ScoreVector out;
  out.iteration = s_text.iterations();
  out.values.resize(s_text.last().size());
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = d_src.last()[i] * s_text.last()[i];
  return out;
}

PropagationTrace combine_traces(const PropagationTrace& s_text, const PropagationTrace& d_src) {
  check_compatible(s_text, d_src);
  PropagationTrace out;
  for (std::size_t t = 0; t < s_text.iterates.size(); ++t) {
    std::vector<double> v(s_text.iterates[t].size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = d_src.iterates[t][i] * s_text.iterates[t][i];
    if (t > 0) {
      double delta = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) delta = std::max(delta, std::abs(v[i] - out.iterates.back()[i]));
      out.delta_inf.push_back(delta);
    }
    out.iterates.push_back(std::move(v));
  }
  return out;
}

}  // namespace soda
