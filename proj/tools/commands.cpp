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

#include "commands.hpp"

#include <chrono>
#include <fstream>

#include <fmt/core.h>

#include "soda/error.hpp"
#include "soda/io.hpp"

namespace soda::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string real(double v) { return io::format_real(v); }

void write_trace(const std::filesystem::path& path, const PropagationTrace& trace) {
  std::string text = "iter,index,value\n";
  for (std::size_t t = 0; t < trace.iterates.size(); ++t) {
    for (std::size_t i = 0; i < trace.iterates[t].size(); ++i) {
      text += fmt::format("{},{},{}\n", t, i, real(trace.iterates[t][i]));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, fmt::format("cannot write {}", path.string()));
}

std::vector<std::uint32_t> predictions_for_labels(const io::ClassAssignment& predicted,
                                                  const io::LabelTable& labels,
                                                  std::vector<std::uint32_t>* true_index,
                                                  std::vector<std::size_t>* rows) {
  // Only ID samples have a correct class. Classes are matched by name; a
  // true class the predictor never emits maps past the end and never matches.
  std::vector<std::uint32_t> pred;
  for (const auto& e : labels.entries) {
    if (e.ood_label != io::OodLabel::kId) continue;
    pred.push_back(predicted.index[e.index]);
    const auto truth = predicted.find(*e.class_label);
    true_index->push_back(truth ? *truth : static_cast<std::uint32_t>(predicted.names.size()));
    rows->push_back(e.index);
  }
  return pred;
}

}  // namespace

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

std::optional<std::string> Manifest::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void Manifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
  if (!out) throw Error(ErrorCode::kIoFailure, fmt::format("cannot write {}", path.string()));
}

std::string format_eval(const metrics::EvalResult& r) {
  return fmt::format("AUC={:.6f} FPR95={:.6f} n_id={} n_ood={}", r.auc, r.fpr95, r.n_id, r.n_ood);
}

Manifest run_score(const ScoreCommand& cmd) {
  const auto start = Clock::now();
  const PipelineOptions& opt = cmd.options;
  const SodaConfig& cfg = opt.config;
  cfg.validate();
  if (cmd.reference_classes && !cmd.reference) {
    throw Error(ErrorCode::kConflictingFlags, "--reference-classes given without --reference");
  }

  PipelineInputs inputs;
  inputs.test = io::load_embeddings(cmd.test);
  const auto prompts = io::load_embeddings(cmd.prompts);
  const auto prompt_classes = io::load_classes(cmd.prompt_classes);
  inputs.prototypes = build_prototypes(synth::prompt_groups(prompts, prompt_classes));
  if (cmd.reference) {
    inputs.reference = io::load_embeddings(*cmd.reference);
    if (cmd.reference_classes) {
      const auto ref_classes = io::load_classes(*cmd.reference_classes);
      if (ref_classes.index.size() != inputs.reference->rows()) {
        throw Error(ErrorCode::kLengthMismatch,
                    fmt::format("{} reference rows but {} class rows", inputs.reference->rows(),
                                ref_classes.index.size()));
      }
      inputs.reference_class_index = ref_classes.index;
    }
  }
  const double load_time = seconds_since(start);

  const PipelineResult res = run_pipeline(inputs, opt);

  const auto write_start = Clock::now();
  io::ScoreTable table{res.s_text, res.d_src, res.score_initial, res.score_final};
  io::save_scores(cmd.out, table);
  if (cmd.trace) write_trace(*cmd.trace, res.combined_trace);
  if (cmd.predictions) {
    io::ClassAssignment predicted{inputs.prototypes.class_names,
                                  classify(inputs.test, inputs.prototypes, opt.threads)};
    io::save_classes(*cmd.predictions, predicted);
  }
  if (cmd.dump_graph) {
    const auto prefix = cmd.dump_graph->string();
    dump_graph(res.graph, prefix + ".edges.csv", prefix + ".epsilon");
  }
  const double write_time = seconds_since(write_start);

  Manifest m;
  m.set("command", "score");
  m.set("test", cmd.test.string());
  m.set("prompts", cmd.prompts.string());
  m.set("prompt-classes", cmd.prompt_classes.string());
  if (cmd.reference) m.set("reference", cmd.reference->string());
  if (cmd.reference_classes) m.set("reference-classes", cmd.reference_classes->string());
  m.set("out", cmd.out.string());
  m.set("mode", std::string(mode_name(cfg.mode)));
  m.set("alpha", real(cfg.alpha));
  m.set("eta", real(cfg.eta));
  m.set("iters", std::to_string(cfg.iters));
  m.set("topk", std::to_string(cfg.topk));
  m.set("baseline", std::string(baseline_name(opt.baseline)));
  m.set("temperature", real(opt.temperature));
  m.set("ridge", real(opt.ridge));
  m.set("seed", std::to_string(cfg.seed));
  m.set("threads", std::to_string(resolve_threads(opt.threads)));
  m.set("early-stop", real(opt.early_stop_tol));
  m.set("oracle", opt.oracle ? "true" : "false");
  m.set("sha256_test", io::sha256_file(cmd.test));
  m.set("sha256_prompts", io::sha256_file(cmd.prompts));
  m.set("sha256_prompt_classes", io::sha256_file(cmd.prompt_classes));
  if (cmd.reference) m.set("sha256_reference", io::sha256_file(*cmd.reference));
  if (cmd.reference_classes) m.set("sha256_reference_classes", io::sha256_file(*cmd.reference_classes));
  m.set("sha256_scores", io::sha256_file(cmd.out));
  m.set("n_test", std::to_string(inputs.test.rows()));
  m.set("dim", std::to_string(inputs.test.cols()));
  m.set("epsilon", real(res.graph.epsilon()));
  m.set("edges", std::to_string(res.graph.edge_count()));
  m.set("iterations_run", std::to_string(res.score_trace.iterations()));
  if (res.oracle_residual) m.set("oracle_residual_inf", real(*res.oracle_residual));

  double graph_and_propagation = 0.0;
  m.set("time_load_s", real(load_time));
  for (const auto& [stage, secs] : res.timings) {
    m.set("time_" + stage + "_s", real(secs));
    // The O(N^2 D) similarity matrix is reported as its own stage.
    if (stage == "graph" || stage == "propagation") graph_and_propagation += secs;
  }
  m.set("time_write_s", real(write_time));
  const double total = seconds_since(start);
  m.set("time_total_s", real(total));
  m.set("graph_propagation_fraction", real(total > 0.0 ? graph_and_propagation / total : 0.0));

  m.write(cmd.manifest ? *cmd.manifest : std::filesystem::path(cmd.out.string() + ".manifest"));
  return m;
}

metrics::EvalResult run_eval(const EvalCommand& cmd, std::ostream& out) {
  const auto scores = io::load_scores(cmd.scores);
  const auto labels = io::load_labels(cmd.labels);
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} scores but {} labels", scores.size(), labels.size()));
  }
  const std::vector<double>* column = nullptr;
  if (cmd.column == "score_final") {
    column = &scores.score_final;
  } else if (cmd.column == "score_initial") {
    column = &scores.score_initial;
  } else if (cmd.column == "s_text") {
    column = &scores.s_text;
  } else if (cmd.column == "d_src") {
    if (!scores.d_src) throw Error(ErrorCode::kConflictingFlags, "scores file has no d_src column");
    column = &*scores.d_src;
  } else {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown score column '{}'", cmd.column));
  }
  const auto result = metrics::evaluate(*column, labels.ood_labels());
  out << format_eval(result) << '\n';

  if (cmd.classes) {
    if (!scores.d_src) throw Error(ErrorCode::kConflictingFlags, "--classes needs a full-mode scores file (d_src)");
    if (!labels.has_class_labels()) {
      throw Error(ErrorCode::kConflictingFlags, "--classes needs a class_label column in the labels file");
    }
    const auto predicted = io::load_classes(*cmd.classes);
    if (predicted.index.size() != labels.size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  fmt::format("{} predictions but {} labels", predicted.index.size(), labels.size()));
    }
    std::vector<std::uint32_t> truth;
    std::vector<std::size_t> rows;
    const auto pred = predictions_for_labels(predicted, labels, &truth, &rows);
    std::vector<double> d_src;
    d_src.reserve(rows.size());
    for (const auto r : rows) d_src.push_back((*scores.d_src)[r]);
    const auto bins = metrics::binned_accuracy(pred, truth, d_src, cmd.bins);

    std::string text = "bin,d_src_min,d_src_max,accuracy,count\n";
    for (std::size_t b = 0; b < bins.size(); ++b) {
      text += fmt::format("{},{},{},{},{}\n", b, real(bins[b].d_src_min), real(bins[b].d_src_max),
                          real(bins[b].accuracy), bins[b].count);
    }
    if (cmd.bins_out) {
      std::ofstream f(*cmd.bins_out, std::ios::binary | std::ios::trunc);
      f << text;
      if (!f) throw Error(ErrorCode::kIoFailure, fmt::format("cannot write {}", cmd.bins_out->string()));
    } else {
      out << text;
    }
  }
  return result;
}

Manifest run_synth(const SynthCommand& cmd) {
  const auto& p = cmd.params;
  const auto data = synth::generate(synth::make_scenario(p));
  const auto paths = synth::write_scenario(data, cmd.out);

  Manifest m;
  m.set("command", "synth");
  m.set("out", cmd.out.string());
  m.set("seed", std::to_string(p.seed));
  m.set("dim", std::to_string(p.dim));
  m.set("id-classes", std::to_string(p.id_classes));
  m.set("ood-classes", std::to_string(p.ood_classes));
  m.set("concentration", real(p.concentration));
  m.set("ood-angle", real(p.ood_angle));
  m.set("n-id", std::to_string(p.n_id_test));
  m.set("n-ood", std::to_string(p.n_ood_test));
  m.set("n-ref", std::to_string(p.n_reference));
  m.set("prompts-per-class", std::to_string(p.prompts_per_class));
  m.set("shift", real(p.shift));
  m.set("prototype-noise", real(p.prototype_noise));
  for (const auto& path : paths) m.set("sha256_" + path.filename().string(), io::sha256_file(path));
  m.write(cmd.out / "synth.manifest");
  return m;
}

}  // namespace soda::cli
