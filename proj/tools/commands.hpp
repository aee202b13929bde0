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

// The `score`, `eval` and `synth` subcommands, callable in-process.

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "soda/metrics.hpp"
#include "soda/pipeline.hpp"
#include "soda/synth.hpp"

namespace soda::cli {

/// Ordered key=value lines. Keys that name a flag can be fed back through
/// --config to repeat a run.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::optional<std::string> get(const std::string& key) const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct ScoreCommand {
  std::filesystem::path test;
  std::filesystem::path prompts;
  std::filesystem::path prompt_classes;
  std::optional<std::filesystem::path> reference;
  std::optional<std::filesystem::path> reference_classes;
  std::filesystem::path out = "scores.csv";
  std::optional<std::filesystem::path> manifest;  // default: <out>.manifest
  std::optional<std::filesystem::path> trace;
  std::optional<std::filesystem::path> predictions;
  std::optional<std::filesystem::path> dump_graph;  // path prefix
  PipelineOptions options;
};

struct EvalCommand {
  std::filesystem::path scores;
  std::filesystem::path labels;
  std::string column = "score_final";
  std::size_t bins = 10;
  std::optional<std::filesystem::path> classes;  // enables the binned analysis
  std::optional<std::filesystem::path> bins_out;
};

struct SynthCommand {
  std::filesystem::path out = "synth";
  synth::ScenarioParams params = synth::standard_params();
};

Manifest run_score(const ScoreCommand& cmd);
/// Writes the one-line summary (and the bin table when no --bins-out file
/// is given) to `out`.
metrics::EvalResult run_eval(const EvalCommand& cmd, std::ostream& out);
Manifest run_synth(const SynthCommand& cmd);

/// `AUC=<v> FPR95=<v> n_id=<c> n_ood=<c>`
std::string format_eval(const metrics::EvalResult& r);

}  // namespace soda::cli
