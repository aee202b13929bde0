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

// End-to-end scoring: initial scores, similarity graph, propagation and (in
// full mode) source-similarity weighting.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "soda/core.hpp"
#include "soda/graph.hpp"
#include "soda/propagation.hpp"
#include "soda/scoring.hpp"

namespace soda {

enum class Baseline { kNone, kMsp, kMls, kCosineProto, kMahalanobis, kSourceSim };

std::string_view baseline_name(Baseline b);
Baseline parse_baseline(std::string_view name);
std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view name);

/// True if the baseline reads reference embeddings.
bool baseline_needs_reference(Baseline b);

struct PipelineInputs {
  EmbeddingMatrix test;
  PrototypeSet prototypes;
  std::optional<EmbeddingMatrix> reference;
  std::vector<std::uint32_t> reference_class_index;  // empty if unknown
};

struct PipelineOptions {
  SodaConfig config;
  Baseline baseline = Baseline::kNone;
  double temperature = 1.0;  // msp
  double ridge = 1e-3;       // mahalanobis
  unsigned threads = 0;
  bool oracle = false;
  double early_stop_tol = 0.0;
};

struct PipelineResult {
  std::vector<double> s_text;
  std::optional<std::vector<double>> d_src;
  std::vector<double> score_initial;
  std::vector<double> score_final;

  SimilarityGraph graph;
  PropagationTrace score_trace;                // propagated initial score
  std::optional<PropagationTrace> d_src_trace;  // full mode only
  /// s^(t) in zero-shot mode, d_src^(t) * s^(t) in full mode.
  PropagationTrace combined_trace;

  /// max-norm gap between the last iterate and the exact fixed point, per
  /// propagated component; set when the oracle was requested.
  std::optional<double> oracle_residual;
  /// Stage name and wall-clock seconds, in execution order.
  std::vector<std::pair<std::string, double>> timings;
};

/// Throws ConflictingFlags when full mode or a reference-based baseline is
/// requested without reference embeddings.
PipelineResult run_pipeline(const PipelineInputs& inputs, const PipelineOptions& options);

}  // namespace soda
