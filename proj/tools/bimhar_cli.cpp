// Copyright (c) 2026 The bimhar Authors. All Rights Reserved
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

// bimhar: schedule-constrained zero-shot activity classification.
//
//   bimhar validate --registry R [--schedule S] [--classes C] [--clips X]
//   bimhar resolve  --registry R --schedule S --at <ISO-8601> [--fallback full|error|empty]
//   bimhar predict  --registry R --schedule S --classes C --clips X --mode off|hard|soft
//                   [--lambda L] [--tau T] [--fallback P] [--strict] [--output F]
//   bimhar evaluate --predictions P [--averaging weighted|macro|micro] [--table]
//   bimhar compare  --baseline A --restricted B [--table]
//   bimhar infonce  --pairs F --tau T
//
// Exit status: 0 success, 1 validation/domain error, 2 I/O or format error.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bimhar/embedding_store.hpp"
#include "bimhar/error.hpp"
#include "bimhar/evaluation.hpp"
#include "bimhar/kernels.hpp"
#include "bimhar/label_registry.hpp"
#include "bimhar/records.hpp"
#include "bimhar/schedule.hpp"
#include "bimhar/scoring.hpp"
#include "json.hpp"

namespace {

using namespace bimhar;

struct RunManifest {
  std::string registry_path;
  std::string schedule_path;
  std::string classes_path;
  std::string clips_path;
  ScoringConfig config;
  std::string mode = "off";
  std::string fallback = "full";
  std::string output;  // empty: stdout
  bool strict = false;
  bool stamp = false;
  int threads = 0;     // 0: OpenMP default
};

struct ReportOptions {
  std::string averaging = "weighted";
  std::string registry_path;
  std::string truths_path;
  std::string output;
  bool table = false;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed while writing '" + path + "'");
}

std::string now_utc() {
  auto now = std::chrono::time_point_cast<std::chrono::microseconds>(std::chrono::system_clock::now());
  return format_timestamp(Timestamp{now.time_since_epoch()});
}

// --- validate ---------------------------------------------------------------

int cmd_validate(const std::string& registry_path, const std::string& schedule_path,
                 const std::string& classes_path, const std::string& clips_path) {
  std::vector<std::string> issues;
  int worst = 0;
  auto record = [&](const Error& e) {
    for (const auto& issue : e.issues()) issues.push_back(issue);
    worst = std::max(worst, exit_code_for(e.kind()));
  };

  std::optional<LabelRegistry> registry;
  try {
    registry = load_registry(read_file(registry_path));
  } catch (const Error& e) {
    record(e);
  }

  std::optional<Schedule> schedule;
  if (!schedule_path.empty()) {
    try {
      schedule = parse_schedule(read_file(schedule_path));
      if (registry) {
        for (auto& issue : dangling_task_references(*schedule, *registry)) {
          issues.push_back(std::move(issue));
          worst = std::max(worst, 1);
        }
      }
    } catch (const Error& e) {
      record(e);
    }
  }

  std::optional<ClassEmbeddingTable> classes;
  if (!classes_path.empty()) {
    try {
      classes = read_embedding_table(read_file(classes_path));
      if (registry) {
        for (const auto& label : registry->labels()) {
          if (classes->find(label.id) == nullptr) {
            issues.push_back("class table has no embedding for label '" + label.id + "'");
            worst = std::max(worst, 1);
          }
        }
      }
    } catch (const Error& e) {
      record(e);
    }
  }

  if (!clips_path.empty()) {
    try {
      auto clips = read_clip_set(read_file(clips_path));
      if (classes && !clips.clips.empty() && clips.dimension != classes->dimension()) {
        issues.push_back("clip dimension " + std::to_string(clips.dimension) +
                         " does not match class dimension " + std::to_string(classes->dimension()));
        worst = std::max(worst, 1);
      }
      if (registry) {
        for (const auto& clip : clips.clips) {
          if (clip.ground_truth && !registry->index_of(*clip.ground_truth)) {
            issues.push_back("clip '" + clip.clip_id + "': ground truth '" + *clip.ground_truth +
                             "' is not a registry label");
            worst = std::max(worst, 1);
          }
        }
      }
    } catch (const Error& e) {
      record(e);
    }
  }

  for (const auto& issue : issues) std::cerr << "error: " << issue << '\n';
  if (issues.empty()) std::cout << "ok\n";
  return worst;
}

// --- resolve ----------------------------------------------------------------

int cmd_resolve(const std::string& registry_path, const std::string& schedule_path,
                const std::string& at, const std::string& fallback) {
  auto registry = load_registry(read_file(registry_path));
  auto schedule = parse_schedule(read_file(schedule_path));
  auto t = parse_timestamp(at);
  auto space = resolve_label_space(schedule, registry, t, fallback_from_string(fallback));

  nlohmann::ordered_json j;
  j["at"] = format_timestamp(t);
  j["active_tasks"] = schedule.active_tasks_at(t);
  j["provenance"] = to_string(space.provenance().kind);
  j["tasks"] = space.provenance().task_ids;
  j["labels"] = std::vector<std::string>(space.ids().begin(), space.ids().end());
  std::cout << j.dump() << '\n';
  return 0;
}

// --- predict ----------------------------------------------------------------

int cmd_predict(RunManifest m) {
  m.config.mode = restriction_mode_from_string(m.mode);
  m.config.fallback = fallback_from_string(m.fallback);
  m.config.validate();
  if (m.threads > 0) omp_set_num_threads(m.threads);

  auto registry = load_registry(read_file(m.registry_path));
  auto schedule = parse_schedule(read_file(m.schedule_path));
  if (auto dangling = dangling_task_references(schedule, registry); !dangling.empty()) {
    throw ValidationError(std::move(dangling));
  }
  auto table = read_embedding_table(read_file(m.classes_path));
  auto clips = read_clip_set(read_file(m.clips_path));

  std::sort(clips.clips.begin(), clips.clips.end(),
            [](const ClipRecord& a, const ClipRecord& b) { return a.clip_id < b.clip_id; });
  if (clips.clips.empty()) std::cerr << "warning: clip set is empty; no predictions written\n";

  auto outcomes = kernels::predict_batch(clips.clips, table, schedule, registry, m.config);

  std::string out;
  if (m.stamp) out += meta_line("bimhar predict", now_utc()) + '\n';
  std::size_t failed = 0;
  for (const auto& outcome : outcomes) {
    if (const auto* p = std::get_if<Prediction>(&outcome)) {
      out += prediction_to_line(*p);
    } else {
      const auto& f = std::get<kernels::ClipFailure>(outcome);
      if (m.strict) {
        throw Error(f.kind, "clip '" + f.clip_id + "': " + f.message);
      }
      std::cerr << "error: clip '" << f.clip_id << "': " << f.message << '\n';
      out += failure_to_line(f);
      ++failed;
    }
    out += '\n';
  }
  emit(m.output, out);
  return failed == 0 ? 0 : 1;
}

// --- evaluate / compare -----------------------------------------------------

std::optional<LabelRegistry> optional_registry(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_registry(read_file(path));
}

void apply_truth_file(RunArtifacts& run, const std::string& truths_path) {
  if (truths_path.empty()) return;
  auto clips = read_clip_set(read_file(truths_path));
  for (const auto& clip : clips.clips) {
    if (clip.ground_truth) run.truths[clip.clip_id] = *clip.ground_truth;
  }
}

RunArtifacts load_run(const PredictionFile& file, const std::string& truths_path) {
  for (const auto& f : file.failures) {
    std::cerr << "warning: skipping failed clip '" << f.clip_id << "': " << f.message << '\n';
  }
  RunArtifacts run{file.predictions, truths_from_predictions(file.predictions)};
  apply_truth_file(run, truths_path);
  return run;
}

int cmd_evaluate(const std::string& predictions_path, const ReportOptions& opt) {
  auto averaging = averaging_from_string(opt.averaging);
  auto registry = optional_registry(opt.registry_path);
  auto file = read_prediction_records(read_file(predictions_path), registry ? &*registry : nullptr);
  if (file.predictions.empty()) throw DomainError("no predictions to evaluate in '" + predictions_path + "'");
  auto run = load_run(file, opt.truths_path);

  auto report = evaluate_run(run, file.registry.label_ids(), averaging);
  for (const auto& w : report.metrics.warnings) std::cerr << "warning: " << w << '\n';
  if (opt.table) {
    emit(opt.output, render_table({{predictions_path, &report}}));
  } else {
    emit(opt.output, run_report_to_json(report, distinct_configs(file.predictions)) + "\n");
  }
  return 0;
}

int cmd_compare(const std::string& baseline_path, const std::string& restricted_path,
                const ReportOptions& opt) {
  auto averaging = averaging_from_string(opt.averaging);
  auto registry = optional_registry(opt.registry_path);
  auto baseline_doc = read_file(baseline_path);
  auto restricted_doc = read_file(restricted_path);

  if (!registry) {
    // One label universe for both runs: baseline labels first, then any
    // label seen only in the restricted run.
    auto a = read_prediction_records(baseline_doc);
    auto b = read_prediction_records(restricted_doc);
    std::vector<ActivityLabel> labels(a.registry.labels().begin(), a.registry.labels().end());
    for (const auto& l : b.registry.labels()) {
      if (!a.registry.index_of(l.id)) labels.push_back(l);
    }
    registry.emplace(std::move(labels), std::vector<TaskDefinition>{});
  }

  auto baseline_file = read_prediction_records(baseline_doc, &*registry);
  auto restricted_file = read_prediction_records(restricted_doc, &*registry);
  auto baseline = load_run(baseline_file, opt.truths_path);
  auto restricted = load_run(restricted_file, opt.truths_path);

  auto report = compare_runs(baseline, restricted, registry->label_ids(), averaging);
  if (opt.table) {
    emit(opt.output, render_table({{"baseline", &report.baseline}, {"restricted", &report.restricted}}));
  } else {
    emit(opt.output, comparison_to_json(report) + "\n");
  }
  return 0;
}

// --- infonce ----------------------------------------------------------------

int cmd_infonce(const std::string& pairs_path, double tau) {
  auto records = read_pair_set(read_file(pairs_path));
  std::vector<EmbeddingPair> pairs;
  pairs.reserve(records.size());
  for (auto& r : records) pairs.emplace_back(std::move(r.video), std::move(r.text));
  double loss = info_nce(pairs, tau);

  nlohmann::ordered_json j;
  j["n"] = pairs.size();
  j["tau"] = tau;
  j["loss"] = loss;
  std::cout << j.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schedule-constrained zero-shot activity classification"};
  app.require_subcommand(1);

  std::string registry_path, schedule_path, classes_path, clips_path;

  auto* validate = app.add_subcommand("validate", "Check registry, schedule and embedding files");
  validate->add_option("--registry", registry_path, "Label registry (JSON)")->required();
  validate->add_option("--schedule", schedule_path, "Schedule (JSON)");
  validate->add_option("--classes", classes_path, "Class embedding table");
  validate->add_option("--clips", clips_path, "Clip embedding set");

  std::string at, fallback = "full";
  auto* resolve = app.add_subcommand("resolve", "Resolve the label space at an instant");
  resolve->add_option("--registry", registry_path, "Label registry (JSON)")->required();
  resolve->add_option("--schedule", schedule_path, "Schedule (JSON)")->required();
  resolve->add_option("--at", at, "ISO-8601 instant with UTC offset")->required();
  resolve->add_option("--fallback", fallback, "full|error|empty")
      ->check(CLI::IsMember({"full", "error", "empty"}));

  RunManifest manifest;
  auto* predict_cmd = app.add_subcommand("predict", "Score clips, one JSON record per clip");
  predict_cmd->add_option("--registry", manifest.registry_path, "Label registry (JSON)")->required();
  predict_cmd->add_option("--schedule", manifest.schedule_path, "Schedule (JSON)")->required();
  predict_cmd->add_option("--classes", manifest.classes_path, "Class embedding table")->required();
  predict_cmd->add_option("--clips", manifest.clips_path, "Clip embedding set")->required();
  predict_cmd->add_option("--mode", manifest.mode, "off|hard|soft")
      ->required()
      ->check(CLI::IsMember({"off", "hard", "soft"}));
  predict_cmd->add_option("--lambda", manifest.config.penalty_lambda, "Soft-mode logit penalty");
  predict_cmd->add_option("--tau", manifest.config.tau, "Softmax temperature");
  predict_cmd->add_option("--fallback", manifest.fallback, "full|error|empty")
      ->check(CLI::IsMember({"full", "error", "empty"}));
  predict_cmd->add_flag("--strict", manifest.strict, "Abort on the first failing clip");
  predict_cmd->add_flag("--stamp", manifest.stamp, "Prepend a metadata line with the run time");
  predict_cmd->add_option("--output", manifest.output, "Output file (default stdout)");
  predict_cmd->add_option("--threads", manifest.threads, "OpenMP thread count");

  ReportOptions report_opt;
  std::string predictions_path;
  auto* evaluate = app.add_subcommand("evaluate", "Accuracy, P/R/F1 and confidence statistics");
  evaluate->add_option("--predictions", predictions_path, "Prediction stream")->required();
  evaluate->add_option("--averaging", report_opt.averaging, "weighted|macro|micro")
      ->check(CLI::IsMember({"weighted", "macro", "micro"}));
  evaluate->add_option("--registry", report_opt.registry_path, "Label registry fixing class order");
  evaluate->add_option("--truths", report_opt.truths_path, "Clip set supplying ground truths");
  evaluate->add_flag("--table", report_opt.table, "Render a table instead of JSON");
  evaluate->add_option("--output", report_opt.output, "Output file (default stdout)");

  std::string baseline_path, restricted_path;
  auto* compare = app.add_subcommand("compare", "Baseline vs restricted run report");
  compare->add_option("--baseline", baseline_path, "Prediction stream, mode off")->required();
  compare->add_option("--restricted", restricted_path, "Prediction stream, restricted")->required();
  compare->add_option("--averaging", report_opt.averaging, "weighted|macro|micro")
      ->check(CLI::IsMember({"weighted", "macro", "micro"}));
  compare->add_option("--registry", report_opt.registry_path, "Label registry fixing class order");
  compare->add_option("--truths", report_opt.truths_path, "Clip set supplying ground truths");
  compare->add_flag("--table", report_opt.table, "Render a table instead of JSON");
  compare->add_option("--output", report_opt.output, "Output file (default stdout)");

  std::string pairs_path;
  double tau = kDefaultTemperature;
  auto* infonce = app.add_subcommand("infonce", "Evaluate the InfoNCE loss over embedding pairs");
  infonce->add_option("--pairs", pairs_path, "Pair file (dim=<D> kind=pair)")->required();
  infonce->add_option("--tau", tau, "Temperature")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*validate) return cmd_validate(registry_path, schedule_path, classes_path, clips_path);
    if (*resolve) return cmd_resolve(registry_path, schedule_path, at, fallback);
    if (*predict_cmd) return cmd_predict(manifest);
    if (*evaluate) return cmd_evaluate(predictions_path, report_opt);
    if (*compare) return cmd_compare(baseline_path, restricted_path, report_opt);
    if (*infonce) return cmd_infonce(pairs_path, tau);
  } catch (const Error& e) {
    for (const auto& issue : e.issues()) std::cerr << "error: " << issue << '\n';
    return exit_code_for(e.kind());
  }
  return 2;
}
