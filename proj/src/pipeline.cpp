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

#include "soda/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/core.h>

#include "soda/error.hpp"

namespace soda {

namespace {

class StageTimer {
 public:
  explicit StageTimer(std::vector<std::pair<std::string, double>>* sink) : sink_(sink) {}

  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_->emplace_back(stage, std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }

 private:
  std::vector<std::pair<std::string, double>>* sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

std::string_view baseline_name(Baseline b) {
  switch (b) {
    case Baseline::kNone: return "none";
    case Baseline::kMsp: return "msp";
    case Baseline::kMls: return "mls";
    case Baseline::kCosineProto: return "cosine_proto";
    case Baseline::kMahalanobis: return "mahalanobis";
    case Baseline::kSourceSim: return "source_sim";
  }
  return "none";
}

Baseline parse_baseline(std::string_view name) {
  for (const auto b : {Baseline::kNone, Baseline::kMsp, Baseline::kMls, Baseline::kCosineProto,
                       Baseline::kMahalanobis, Baseline::kSourceSim}) {
    if (baseline_name(b) == name) return b;
  }
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown baseline '{}'", name));
}

std::string_view mode_name(Mode m) { return m == Mode::kFull ? "full" : "zs"; }

Mode parse_mode(std::string_view name) {
  if (name == "zs" || name == "zero_shot") return Mode::kZeroShot;
  if (name == "full") return Mode::kFull;
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown mode '{}'", name));
}

bool baseline_needs_reference(Baseline b) {
  return b == Baseline::kCosineProto || b == Baseline::kMahalanobis || b == Baseline::kSourceSim;
}

PipelineResult run_pipeline(const PipelineInputs& in, const PipelineOptions& opt) {
  const SodaConfig& cfg = opt.config;
  cfg.validate();
  const bool full = cfg.mode == Mode::kFull;
  if ((full || baseline_needs_reference(opt.baseline)) && !in.reference) {
    throw Error(ErrorCode::kConflictingFlags,
                fmt::format("mode {} with baseline {} requires reference embeddings", mode_name(cfg.mode),
                            baseline_name(opt.baseline)));
  }
  const bool needs_classes = opt.baseline == Baseline::kCosineProto || opt.baseline == Baseline::kMahalanobis;
  if (needs_classes && in.reference_class_index.size() != in.reference->rows()) {
    throw Error(ErrorCode::kConflictingFlags,
                fmt::format("baseline {} requires a class for every reference row", baseline_name(opt.baseline)));
  }

  PipelineResult res;
  StageTimer timer(&res.timings);

  res.s_text = text_score(in.test, in.prototypes, opt.threads).values;
  std::vector<double> s0;
  switch (opt.baseline) {
    case Baseline::kNone:
    case Baseline::kMls:
      s0 = res.s_text;
      break;
    case Baseline::kMsp:
      s0 = msp_score(in.test, in.prototypes, opt.temperature, opt.threads).values;
      break;
    case Baseline::kCosineProto:
      s0 = cosine_proto_score(in.test, *in.reference, in.reference_class_index, opt.threads).values;
      break;
    case Baseline::kMahalanobis:
      s0 = mahalanobis_score(in.test, *in.reference, in.reference_class_index, opt.ridge, opt.threads).values;
      break;
    case Baseline::kSourceSim:
      s0 = source_similarity(in.test, *in.reference, cfg.topk, opt.threads).values;
      break;
  }
  if (full) res.d_src = source_similarity(in.test, *in.reference, cfg.topk, opt.threads).values;
  timer.lap("initial_scores");

  if (in.test.rows() >= 2) {
    const SimilarityMatrix sims = pairwise_similarity(in.test, opt.threads);
    timer.lap("similarity");
    res.graph = build_graph(sims, cfg.eta, opt.threads);
  } else {
    // No pairs to take a percentile of; a lone sample only sees itself.
    timer.lap("similarity");
    res.graph = SimilarityGraph::self_loops(in.test.rows());
  }
  timer.lap("graph");

  const PropagateOptions popt{opt.threads, opt.early_stop_tol};
  res.score_trace = propagate(s0, res.graph, cfg.alpha, cfg.iters, popt);
  if (full) {
    res.d_src_trace = propagate(*res.d_src, res.graph, cfg.alpha, res.score_trace.iterations(), {opt.threads, 0.0});
  }
  timer.lap("propagation");

  if (full) {
    res.combined_trace = combine_traces(res.score_trace, *res.d_src_trace);
    res.score_final = soda_combine(res.score_trace, *res.d_src_trace).values;
  } else {
    res.combined_trace = res.score_trace;
    res.score_final = res.score_trace.last();
  }
  res.score_initial = res.combined_trace.initial();

  if (opt.oracle) {
    const auto fixed = solve_fixed_point(s0, res.graph, cfg.alpha);
    double residual = max_abs_diff(res.score_trace.last(), fixed.values);
    if (full) {
      const auto fixed_src = solve_fixed_point(*res.d_src, res.graph, cfg.alpha);
      residual = std::max(residual, max_abs_diff(res.d_src_trace->last(), fixed_src.values));
    }
    res.oracle_residual = residual;
    timer.lap("oracle");
  }
  return res;
}

}  // namespace soda
