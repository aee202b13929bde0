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

// soda: score, evaluate and synthesize embedding sets for OOD detection.
//
// Exit codes: 0 success, 2 input validation failure, 3 numeric failure.
// Failures print a single `ERROR <code>: <detail>` line on stderr.

#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "soda/error.hpp"

namespace {

using soda::cli::EvalCommand;
using soda::cli::ScoreCommand;
using soda::cli::SynthCommand;

// CLI11 does not apply config files to subcommand options, so `--config`
// is expanded here: every key=value line naming an option of the chosen
// subcommand becomes `--key=value` unless that option was given on the
// command line. Unknown keys (digests, timings in a manifest) are skipped.
void add_config_flag(CLI::App& sub, const std::string& help) {
  // Consumed by expand_config before parsing; registered for --help only.
  static std::string ignored;
  sub.add_option("--config", ignored, help);
}

std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  if (args.size() < 2) return args;
  const CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args[1]);
  } catch (const CLI::OptionNotFound&) {
    return args;
  }
  std::string path;
  std::set<std::string> given;
  for (std::size_t k = 2; k < args.size(); ++k) {
    const std::string& a = args[k];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(key);
    if (key == "config") {
      if (eq != std::string::npos) {
        path = a.substr(eq + 1);
      } else if (k + 1 < args.size()) {
        path = args[k + 1];
      }
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw soda::Error(soda::ErrorCode::kIoFailure, "cannot open config " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    if (key == "config" || given.count(key) != 0) continue;
    if (sub->get_option_no_throw("--" + key) == nullptr) continue;
    args.push_back("--" + key + "=" + line.substr(eq + 1));
  }
  return args;
}

struct ScoreFlags {
  ScoreCommand cmd;
  std::string reference;
  std::string reference_classes;
  std::string manifest;
  std::string trace;
  std::string predictions;
  std::string dump_graph;
  std::string mode = "zs";
  std::string baseline = "none";
};

void add_score(CLI::App& app, ScoreFlags& f) {
  auto* sub = app.add_subcommand("score", "Score a test set; writes scores CSV and a manifest");
  add_config_flag(*sub, "key=value file of flag defaults (a score manifest works)");
  auto& cfg = f.cmd.options.config;
  sub->add_option("--test", f.cmd.test, "test embeddings (.emb)")->required();
  sub->add_option("--prompts", f.cmd.prompts, "prompt embeddings (.emb)")->required();
  sub->add_option("--prompt-classes", f.cmd.prompt_classes, "row,class_name CSV for prompts")->required();
  sub->add_option("--reference", f.reference, "reference (source-domain ID) embeddings");
  sub->add_option("--reference-classes", f.reference_classes, "row,class_name CSV for reference rows");
  sub->add_option("--out", f.cmd.out, "scores CSV")->capture_default_str();
  sub->add_option("--manifest", f.manifest, "manifest path (default <out>.manifest)");
  sub->add_option("--mode", f.mode, "zs | full")->capture_default_str()->check(CLI::IsMember({"zs", "full"}));
  sub->add_option("--alpha", cfg.alpha, "anchor weight of the initial score")->capture_default_str();
  sub->add_option("--eta", cfg.eta, "fraction of test pairs joined in the graph")->capture_default_str();
  sub->add_option("--iters", cfg.iters, "propagation iterations T")->capture_default_str();
  sub->add_option("--topk", cfg.topk, "reference neighbors averaged for d_src")->capture_default_str();
  sub->add_option("--baseline", f.baseline, "initial score: none|msp|mls|cosine_proto|mahalanobis|source_sim")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "msp", "mls", "cosine_proto", "mahalanobis", "source_sim"}));
  sub->add_option("--temperature", f.cmd.options.temperature, "MSP softmax temperature")->capture_default_str();
  sub->add_option("--ridge", f.cmd.options.ridge, "Mahalanobis covariance ridge")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "recorded in the manifest")->capture_default_str();
  sub->add_option("--threads", f.cmd.options.threads, "worker threads, 0 = all cores")->capture_default_str();
  sub->add_option("--early-stop", f.cmd.options.early_stop_tol, "stop when max score change < tol (0 = off)")
      ->capture_default_str();
  sub->add_flag("--oracle", f.cmd.options.oracle, "record distance to the exact fixed point");
  sub->add_option("--trace", f.trace, "write every iterate as iter,index,value CSV");
  sub->add_option("--predictions", f.predictions, "write argmax text-prototype classes (row,class_name)");
  sub->add_option("--dump-graph", f.dump_graph, "write <prefix>.edges.csv and <prefix>.epsilon");
}

void finish_score(ScoreFlags& f) {
  auto opt = [](const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<std::filesystem::path>(s);
  };
  f.cmd.reference = opt(f.reference);
  f.cmd.reference_classes = opt(f.reference_classes);
  f.cmd.manifest = opt(f.manifest);
  f.cmd.trace = opt(f.trace);
  f.cmd.predictions = opt(f.predictions);
  f.cmd.dump_graph = opt(f.dump_graph);
  f.cmd.options.config.mode = soda::parse_mode(f.mode);
  f.cmd.options.baseline = soda::parse_baseline(f.baseline);
}

struct EvalFlags {
  EvalCommand cmd;
  std::string classes;
  std::string bins_out;
};

void add_eval(CLI::App& app, EvalFlags& f) {
  auto* sub = app.add_subcommand("eval", "AUC / FPR95 of a scores file, optional binned accuracy");
  add_config_flag(*sub, "key=value file of flag defaults");
  sub->add_option("--scores", f.cmd.scores, "scores CSV")->required();
  sub->add_option("--labels", f.cmd.labels, "labels CSV")->required();
  sub->add_option("--column", f.cmd.column, "score column to evaluate")
      ->capture_default_str()
      ->check(CLI::IsMember({"score_final", "score_initial", "s_text", "d_src"}));
  sub->add_option("--bins", f.cmd.bins, "number of equal-count d_src bins")->capture_default_str();
  sub->add_option("--classes", f.classes, "predicted classes CSV (row,class_name); enables accuracy per d_src bin");
  sub->add_option("--bins-out", f.bins_out, "write the bin table here instead of stdout");
}

void add_synth(CLI::App& app, SynthCommand& c) {
  auto* sub = app.add_subcommand("synth", "Generate a synthetic embedding scenario");
  add_config_flag(*sub, "key=value file of flag defaults");
  auto& p = c.params;
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--seed", p.seed)->capture_default_str();
  sub->add_option("--dim", p.dim)->capture_default_str();
  sub->add_option("--id-classes", p.id_classes)->capture_default_str();
  sub->add_option("--ood-classes", p.ood_classes)->capture_default_str();
  sub->add_option("--concentration", p.concentration, "cluster tightness")->capture_default_str();
  sub->add_option("--ood-angle", p.ood_angle, "radians between OOD and ID means; <= 0 draws independently")
      ->capture_default_str();
  sub->add_option("--n-id", p.n_id_test, "test samples per ID class")->capture_default_str();
  sub->add_option("--n-ood", p.n_ood_test, "test samples per OOD class")->capture_default_str();
  sub->add_option("--n-ref", p.n_reference, "reference samples per ID class")->capture_default_str();
  sub->add_option("--prompts-per-class", p.prompts_per_class)->capture_default_str();
  sub->add_option("--shift", p.shift, "test-domain rotation, radians")->capture_default_str();
  sub->add_option("--prototype-noise", p.prototype_noise, "prompt rotation, radians")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soda: transductive OOD scoring over embedding files"};
  app.require_subcommand(1);
  ScoreFlags score;
  EvalFlags eval;
  SynthCommand synth;
  add_score(app, score);
  add_eval(app, eval);
  add_synth(app, synth);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(app, std::move(args));
    // CLI11 takes the arguments in reverse order, program name excluded.
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const soda::Error& e) {
    std::cerr << "ERROR " << soda::error_name(e.code()) << ": " << e.detail() << '\n';
    return e.exit_code();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ERROR InvalidArgument: " << e.what() << '\n';
    return 2;
  }

  try {
    if (app.got_subcommand("score")) {
      finish_score(score);
      soda::cli::run_score(score.cmd);
    } else if (app.got_subcommand("eval")) {
      if (!eval.classes.empty()) eval.cmd.classes = eval.classes;
      if (!eval.bins_out.empty()) eval.cmd.bins_out = eval.bins_out;
      soda::cli::run_eval(eval.cmd, std::cout);
    } else if (app.got_subcommand("synth")) {
      soda::cli::run_synth(synth);
    }
  } catch (const soda::Error& e) {
    std::cerr << "ERROR " << soda::error_name(e.code()) << ": " << e.detail() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "ERROR IoFailure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
