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

#include "bimhar/records.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "bimhar/error.hpp"
#include "json.hpp"

namespace bimhar {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kSumTolerance = 1e-9;
constexpr double kConfidenceTolerance = 1e-12;

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kDomain: return "domain";
  }
  return "domain";
}

ErrorKind kind_from_name(std::string_view name) {
  if (name == "parse") return ErrorKind::kParse;
  if (name == "io") return ErrorKind::kIo;
  if (name == "validation") return ErrorKind::kValidation;
  return ErrorKind::kDomain;
}

ordered_json space_to_json(const LabelSpace& space) {
  ordered_json j;
  j["provenance"] = to_string(space.provenance().kind);
  j["tasks"] = space.provenance().task_ids;
  j["labels"] = std::vector<std::string>(space.ids().begin(), space.ids().end());
  return j;
}

struct RawSpace {
  Provenance provenance;
  std::vector<std::string> labels;
};

struct RawRecord {
  std::string clip_id;
  std::string timestamp;
  std::optional<std::string> ground_truth;
  RawSpace space;
  std::optional<RawSpace> restriction;
  std::vector<double> distribution;
  std::string predicted;
  double confidence = 0.0;
  ScoringConfig config;
};

RawSpace space_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": label space must be an object");
  RawSpace s;
  s.provenance.kind = provenance_from_string(j.at("provenance").get<std::string>());
  s.provenance.task_ids = j.at("tasks").get<std::vector<std::string>>();
  s.labels = j.at("labels").get<std::vector<std::string>>();
  return s;
}

RawRecord record_from_json(const json& j, const std::string& where) {
  RawRecord r;
  r.clip_id = j.at("clip_id").get<std::string>();
  r.timestamp = j.at("timestamp").get<std::string>();
  if (const auto& gt = j.at("ground_truth"); !gt.is_null()) r.ground_truth = gt.get<std::string>();
  r.space = space_from_json(j.at("label_space"), where);
  if (auto it = j.find("restriction"); it != j.end() && !it->is_null()) r.restriction = space_from_json(*it, where);
  r.distribution = j.at("distribution").get<std::vector<double>>();
  r.predicted = j.at("predicted").get<std::string>();
  r.confidence = j.at("confidence").get<double>();
  const auto& cfg = j.at("config");
  r.config.mode = restriction_mode_from_string(cfg.at("mode").get<std::string>());
  r.config.tau = cfg.at("tau").get<double>();
  r.config.penalty_lambda = cfg.at("lambda").get<double>();
  r.config.fallback = fallback_from_string(cfg.at("fallback").get<std::string>());
  return r;
}

LabelRegistry derive_registry(const std::vector<RawRecord>& records) {
  std::vector<ActivityLabel> labels;
  std::set<std::string> seen;
  auto add = [&](const std::string& id) {
    if (seen.insert(id).second) labels.push_back(ActivityLabel{id, id, id});
  };
  for (const auto& r : records) {
    for (const auto& id : r.space.labels) add(id);
    if (r.restriction) {
      for (const auto& id : r.restriction->labels) add(id);
    }
  }
  if (labels.empty()) labels.push_back(ActivityLabel{"unlabeled", "unlabeled", "unlabeled"});
  return LabelRegistry(std::move(labels), {});
}

Prediction to_prediction(RawRecord raw, const LabelRegistry& registry) {
  auto fail = [&](const std::string& why) -> ValidationError {
    return ValidationError("clip '" + raw.clip_id + "': " + why);
  };
  if (raw.distribution.size() != raw.space.labels.size()) {
    throw fail("distribution has " + std::to_string(raw.distribution.size()) +
               " entries for " + std::to_string(raw.space.labels.size()) + " labels");
  }
  if (raw.space.labels.empty()) throw fail("empty label space");

  Prediction p;
  p.clip_id = raw.clip_id;
  try {
    p.timestamp = parse_timestamp(raw.timestamp);
  } catch (const ParseError& e) {
    throw fail(e.what());
  }
  p.ground_truth = raw.ground_truth;
  try {
    p.label_space = registry.make_space(raw.space.labels, raw.space.provenance);
    if (raw.restriction) p.restriction = registry.make_space(raw.restriction->labels, raw.restriction->provenance);
  } catch (const Error& e) {
    throw fail(e.what());
  }
  if (p.label_space.size() != raw.space.labels.size()) throw fail("duplicate labels in label space");

  // Align the distribution with canonical registry order.
  p.distribution.resize(raw.distribution.size());
  for (std::size_t i = 0; i < raw.space.labels.size(); ++i) {
    auto pos = p.label_space.position_of(*registry.index_of(raw.space.labels[i]));
    p.distribution[*pos] = raw.distribution[i];
  }

  double sum = 0.0;
  for (double x : p.distribution) {
    if (!(std::isfinite(x) && x >= 0.0)) throw fail("distribution entries must be finite and nonnegative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) throw fail("distribution sums to " + std::to_string(sum));
  if (!p.label_space.contains(raw.predicted)) {
    throw fail("predicted label '" + raw.predicted + "' is outside its label space");
  }
  const double max = *std::max_element(p.distribution.begin(), p.distribution.end());
  auto predicted_pos = std::find(p.label_space.ids().begin(), p.label_space.ids().end(), raw.predicted) -
                       p.label_space.ids().begin();
  if (p.distribution[static_cast<std::size_t>(predicted_pos)] != max) {
    throw fail("predicted label '" + raw.predicted + "' is not the most probable class");
  }
  if (std::abs(raw.confidence - max) > kConfidenceTolerance) {
    throw fail("confidence does not equal the maximum probability");
  }
  p.predicted_label = raw.predicted;
  p.confidence = raw.confidence;
  p.config = raw.config;
  return p;
}

ordered_json averaged_to_json(const AveragedMetrics& m) {
  ordered_json j;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  return j;
}

ordered_json summary_to_json(const Summary& s) {
  ordered_json j;
  j["count"] = s.count;
  j["mean"] = s.mean;
  j["median"] = s.median;
  j["min"] = s.min;
  j["max"] = s.max;
  j["q1"] = s.q1;
  j["q3"] = s.q3;
  return j;
}

ordered_json config_to_json(const ScoringConfig& c) {
  ordered_json j;
  j["mode"] = to_string(c.mode);
  j["tau"] = c.tau;
  j["lambda"] = c.penalty_lambda;
  j["fallback"] = to_string(c.fallback);
  return j;
}

ordered_json metrics_to_json(const MetricsReport& m) {
  ordered_json j;
  j["averaging"] = to_string(m.averaging);
  j["total"] = m.total;
  j["correct"] = m.correct;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.headline().precision;
  j["recall"] = m.headline().recall;
  j["f1"] = m.headline().f1;
  j["weighted"] = averaged_to_json(m.weighted);
  j["macro"] = averaged_to_json(m.macro);
  j["micro"] = averaged_to_json(m.micro);
  ordered_json classes = ordered_json::array();
  for (const auto& c : m.per_class) {
    ordered_json cj;
    cj["label"] = c.label;
    cj["precision"] = c.precision;
    cj["recall"] = c.recall;
    cj["f1"] = c.f1;
    cj["support"] = c.support;
    cj["predicted"] = c.predicted;
    classes.push_back(std::move(cj));
  }
  j["per_class"] = std::move(classes);
  return j;
}

ordered_json confidence_to_json(const ConfidenceStats& c) {
  ordered_json j;
  j["all"] = summary_to_json(c.all);
  j["correct"] = c.correct ? summary_to_json(*c.correct) : ordered_json(nullptr);
  return j;
}

ordered_json run_to_json(const RunReport& r) {
  ordered_json j;
  j["metrics"] = metrics_to_json(r.metrics);
  j["confidence"] = confidence_to_json(r.confidence);
  j["warnings"] = r.metrics.warnings;
  return j;
}

std::string fixed(double value, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace

std::string prediction_to_line(const Prediction& p) {
  ordered_json j;
  j["clip_id"] = p.clip_id;
  j["timestamp"] = format_timestamp(p.timestamp);
  j["ground_truth"] = p.ground_truth ? ordered_json(*p.ground_truth) : ordered_json(nullptr);
  j["label_space"] = space_to_json(p.label_space);
  j["restriction"] = p.restriction ? space_to_json(*p.restriction) : ordered_json(nullptr);
  j["distribution"] = p.distribution;
  j["predicted"] = p.predicted_label;
  j["confidence"] = p.confidence;
  j["config"] = config_to_json(p.config);
  return j.dump();
}

std::string failure_to_line(const kernels::ClipFailure& failure) {
  ordered_json j;
  j["clip_id"] = failure.clip_id;
  ordered_json err;
  err["kind"] = kind_name(failure.kind);
  err["message"] = failure.message;
  j["error"] = std::move(err);
  return j.dump();
}

std::string meta_line(std::string_view generator, std::string_view generated_at) {
  ordered_json j;
  j["meta"]["generator"] = generator;
  j["meta"]["generated_at"] = generated_at;
  return j.dump();
}

PredictionFile read_prediction_records(std::string_view document, const LabelRegistry* registry) {
  std::vector<RawRecord> raws;
  std::vector<kernels::ClipFailure> failures;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < document.size()) {
    auto end = document.find('\n', start);
    auto line = document.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? document.size() : end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const std::string where = "predictions line " + std::to_string(line_no);
    try {
      auto j = json::parse(line);
      if (!j.is_object()) throw ParseError(where + ": record must be an object");
      if (j.contains("meta")) continue;
      if (j.contains("error")) {
        failures.push_back(kernels::ClipFailure{
            j.at("clip_id").get<std::string>(),
            kind_from_name(j.at("error").at("kind").get<std::string>()),
            j.at("error").at("message").get<std::string>()});
        continue;
      }
      raws.push_back(record_from_json(j, where));
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }

  PredictionFile file{registry ? *registry : derive_registry(raws), {}, std::move(failures)};
  file.predictions.reserve(raws.size());
  for (auto& raw : raws) file.predictions.push_back(to_prediction(std::move(raw), file.registry));
  return file;
}

}  // namespace bimhar

namespace bimhar {

std::vector<ScoringConfig> distinct_configs(std::span<const Prediction> predictions) {
  std::vector<ScoringConfig> out;
  for (const auto& p : predictions) {
    auto same = [&](const ScoringConfig& c) {
      return c.mode == p.config.mode && c.tau == p.config.tau &&
             c.penalty_lambda == p.config.penalty_lambda && c.fallback == p.config.fallback;
    };
    if (std::none_of(out.begin(), out.end(), same)) out.push_back(p.config);
  }
  return out;
}

std::string run_report_to_json(const RunReport& report, const std::vector<ScoringConfig>& configs) {
  auto j = run_to_json(report);
  ordered_json echo = ordered_json::array();
  for (const auto& c : configs) echo.push_back(config_to_json(c));
  j["config"] = std::move(echo);
  return j.dump(2);
}

std::string comparison_to_json(const ComparisonReport& r) {
  ordered_json j;
  j["baseline"] = run_to_json(r.baseline);
  j["restricted"] = run_to_json(r.restricted);
  ordered_json deltas;
  deltas["accuracy"] = r.accuracy_delta;
  deltas["weighted"] = averaged_to_json(r.weighted_delta);
  deltas["macro"] = averaged_to_json(r.macro_delta);
  deltas["micro"] = averaged_to_json(r.micro_delta);
  deltas["confidence_mean"] = r.confidence_mean_delta;
  deltas["correct_confidence_mean"] =
      r.correct_confidence_mean_delta ? ordered_json(*r.correct_confidence_mean_delta) : ordered_json(nullptr);
  j["deltas"] = std::move(deltas);
  ordered_json clips = ordered_json::array();
  for (const auto& c : r.per_clip) {
    ordered_json cj;
    cj["clip_id"] = c.clip_id;
    cj["truth"] = c.truth;
    cj["baseline_predicted"] = c.baseline_predicted;
    cj["restricted_predicted"] = c.restricted_predicted;
    cj["baseline_confidence"] = c.baseline_confidence;
    cj["restricted_confidence"] = c.restricted_confidence;
    cj["confidence_delta"] = c.delta;
    clips.push_back(std::move(cj));
  }
  j["per_clip"] = std::move(clips);
  return j.dump(2);
}

std::string render_table(const std::vector<std::pair<std::string, const RunReport*>>& rows) {
  std::size_t width = 3;
  for (const auto& [name, _] : rows) width = std::max(width, name.size());
  auto pad = [](std::string s, std::size_t w, bool left) {
    if (s.size() >= w) return s;
    return left ? s + std::string(w - s.size(), ' ') : std::string(w - s.size(), ' ') + s;
  };
  std::string out = pad("Run", width, true) + "  Accuracy  Precision  Recall  F1 Score\n";
  for (const auto& [name, report] : rows) {
    const auto& m = report->metrics;
    out += pad(name, width, true) + "  " + pad(fixed(m.accuracy * 100.0, 2) + "%", 8, false) + "  " +
           pad(fixed(m.headline().precision, 2), 9, false) + "  " +
           pad(fixed(m.headline().recall, 2), 6, false) + "  " +
           pad(fixed(m.headline().f1, 2), 8, false) + "\n";
  }
  return out;
}

}  // namespace bimhar
