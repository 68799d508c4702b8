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

#include "bimhar/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "bimhar/error.hpp"

namespace bimhar {

namespace {

std::unordered_map<std::string, std::size_t> index_labels(std::span<const std::string> labels) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!index.emplace(labels[i], i).second) {
      throw ValidationError("duplicate label '" + labels[i] + "' in evaluation label set");
    }
  }
  return index;
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// Linear interpolation between closest ranks over sorted data.
double quantile(const std::vector<double>& sorted, double q) {
  double pos = q * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(pos);
  auto hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

const std::string& truth_for(const TruthMap& truths, const std::string& clip_id) {
  auto it = truths.find(clip_id);
  if (it == truths.end()) throw ValidationError("no ground truth for clip '" + clip_id + "'");
  return it->second;
}

AveragedMetrics subtract(const AveragedMetrics& a, const AveragedMetrics& b) {
  return {a.precision - b.precision, a.recall - b.recall, a.f1 - b.f1};
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)), counts_(labels_.size() * labels_.size(), 0) {}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::uint64_t n) {
  if (truth >= size() || predicted >= size()) throw DomainError("confusion index out of range");
  counts_[truth * size() + predicted] += n;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (labels_ != other.labels_) throw DomainError("cannot merge confusion matrices over different labels");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < size(); ++i) t += count(i, i);
  return t;
}

std::uint64_t ConfusionMatrix::support(std::size_t label) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < size(); ++j) s += count(label, j);
  return s;
}

std::uint64_t ConfusionMatrix::predicted(std::size_t label) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < size(); ++i) s += count(i, label);
  return s;
}

TruthMap truths_from_predictions(std::span<const Prediction> predictions) {
  TruthMap truths;
  for (const auto& p : predictions) {
    if (!p.ground_truth) continue;
    auto [it, inserted] = truths.emplace(p.clip_id, *p.ground_truth);
    if (!inserted && it->second != *p.ground_truth) {
      throw ValidationError("conflicting ground truths for clip '" + p.clip_id + "'");
    }
  }
  return truths;
}

ConfusionMatrix build_confusion(std::span<const Prediction> predictions, const TruthMap& truths,
                                std::vector<std::string> labels) {
  auto index = index_labels(labels);
  ConfusionMatrix cm(std::move(labels));
  std::set<std::string_view> seen;
  for (const auto& p : predictions) {
    if (!seen.insert(p.clip_id).second) {
      throw ValidationError("clip '" + p.clip_id + "' is predicted more than once");
    }
    const auto& truth = truth_for(truths, p.clip_id);
    auto t = index.find(truth);
    if (t == index.end()) {
      throw ValidationError("clip '" + p.clip_id + "': truth label '" + truth + "' is unknown");
    }
    auto q = index.find(p.predicted_label);
    if (q == index.end()) {
      throw ValidationError("clip '" + p.clip_id + "': predicted label '" + p.predicted_label +
                            "' is unknown");
    }
    cm.add(t->second, q->second);
  }
  return cm;
}

std::string_view to_string(Averaging averaging) {
  switch (averaging) {
    case Averaging::kWeighted: return "weighted";
    case Averaging::kMacro: return "macro";
    case Averaging::kMicro: return "micro";
  }
  return "weighted";
}

Averaging averaging_from_string(std::string_view text) {
  if (text == "weighted") return Averaging::kWeighted;
  if (text == "macro") return Averaging::kMacro;
  if (text == "micro") return Averaging::kMicro;
  throw ParseError("unknown averaging '" + std::string(text) + "'");
}

const AveragedMetrics& MetricsReport::headline() const {
  switch (averaging) {
    case Averaging::kMacro: return macro;
    case Averaging::kMicro: return micro;
    case Averaging::kWeighted: break;
  }
  return weighted;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm, Averaging averaging) {
  MetricsReport r;
  r.averaging = averaging;
  r.total = cm.total();
  if (r.total == 0) throw DomainError("cannot compute metrics over an empty confusion matrix");
  r.correct = cm.trace();
  r.accuracy = ratio(r.correct, r.total);

  for (std::size_t c = 0; c < cm.size(); ++c) {
    ClassMetrics m;
    m.label = std::string(cm.labels()[c]);
    m.support = cm.support(c);
    m.predicted = cm.predicted(c);
    if (m.support == 0 && m.predicted == 0) continue;
    const auto tp = cm.count(c, c);
    if (m.predicted == 0) {
      r.warnings.push_back("precision of '" + m.label + "' is ill-defined (never predicted); set to 0");
    }
    if (m.support == 0) {
      r.warnings.push_back("recall of '" + m.label + "' is ill-defined (no true samples); set to 0");
    }
    m.precision = ratio(tp, m.predicted);
    m.recall = ratio(tp, m.support);
    // 2TP / (2TP + FP + FN): the harmonic mean of P and R, 0 when both are 0
    m.f1 = ratio(2 * tp, m.predicted + m.support);
    r.per_class.push_back(std::move(m));
  }

  // Sum first, divide once: a perfect run then averages to exactly 1.
  for (const auto& m : r.per_class) {
    r.macro.precision += m.precision;
    r.macro.recall += m.recall;
    r.macro.f1 += m.f1;
    const auto w = static_cast<double>(m.support);
    r.weighted.precision += w * m.precision;
    r.weighted.recall += w * m.recall;
    r.weighted.f1 += w * m.f1;
  }
  const auto n_classes = static_cast<double>(r.per_class.size());
  const auto n = static_cast<double>(r.total);
  r.macro = {r.macro.precision / n_classes, r.macro.recall / n_classes, r.macro.f1 / n_classes};
  r.weighted = {r.weighted.precision / n, r.weighted.recall / n, r.weighted.f1 / n};

  // Global TP = trace, FP = FN = total - trace.
  const auto errors = r.total - r.correct;
  r.micro.precision = ratio(r.correct, r.correct + errors);
  r.micro.recall = ratio(r.correct, r.correct + errors);
  r.micro.f1 = ratio(2 * r.correct, 2 * r.correct + 2 * errors);
  return r;
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw DomainError("summary of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  Summary s;
  s.count = sorted.size();
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.count);
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile(sorted, 0.25);
  s.median = quantile(sorted, 0.5);
  s.q3 = quantile(sorted, 0.75);
  return s;
}

ConfidenceStats confidence_stats(std::span<const Prediction> predictions, const TruthMap& truths) {
  if (predictions.empty()) throw DomainError("confidence statistics need at least one prediction");
  std::vector<double> all, correct;
  for (const auto& p : predictions) {
    if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
      throw ValidationError("clip '" + p.clip_id + "': confidence is not a probability");
    }
    all.push_back(p.confidence);
    if (truth_for(truths, p.clip_id) == p.predicted_label) correct.push_back(p.confidence);
  }
  ConfidenceStats stats{summarize(all), std::nullopt};
  if (!correct.empty()) stats.correct = summarize(correct);
  return stats;
}

RunReport evaluate_run(const RunArtifacts& run, std::vector<std::string> labels,
                       Averaging averaging) {
  auto cm = build_confusion(run.predictions, run.truths, std::move(labels));
  return RunReport{compute_metrics(cm, averaging), confidence_stats(run.predictions, run.truths)};
}

ComparisonReport compare_runs(const RunArtifacts& baseline, const RunArtifacts& restricted,
                              std::vector<std::string> labels, Averaging averaging) {
  std::map<std::string, const Prediction*> base, rest;
  for (const auto& p : baseline.predictions) base.emplace(p.clip_id, &p);
  for (const auto& p : restricted.predictions) rest.emplace(p.clip_id, &p);

  std::vector<std::string> issues;
  for (const auto& [id, _] : base) {
    if (!rest.contains(id)) issues.push_back("clip '" + id + "' only in baseline run");
  }
  for (const auto& [id, _] : rest) {
    if (!base.contains(id)) issues.push_back("clip '" + id + "' only in restricted run");
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));

  for (const auto& [id, _] : base) {
    const auto& a = truth_for(baseline.truths, id);
    const auto& b = truth_for(restricted.truths, id);
    if (a != b) {
      issues.push_back("clip '" + id + "': truth '" + a + "' in baseline vs '" + b + "' in restricted");
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));

  ComparisonReport r;
  r.baseline = evaluate_run(baseline, labels, averaging);
  r.restricted = evaluate_run(restricted, std::move(labels), averaging);
  r.accuracy_delta = r.restricted.metrics.accuracy - r.baseline.metrics.accuracy;
  r.weighted_delta = subtract(r.restricted.metrics.weighted, r.baseline.metrics.weighted);
  r.macro_delta = subtract(r.restricted.metrics.macro, r.baseline.metrics.macro);
  r.micro_delta = subtract(r.restricted.metrics.micro, r.baseline.metrics.micro);
  r.confidence_mean_delta = r.restricted.confidence.all.mean - r.baseline.confidence.all.mean;
  if (r.restricted.confidence.correct && r.baseline.confidence.correct) {
    r.correct_confidence_mean_delta =
        r.restricted.confidence.correct->mean - r.baseline.confidence.correct->mean;
  }

  for (const auto& [id, b] : base) {
    const auto* p = rest.at(id);
    r.per_clip.push_back(ClipDelta{id, baseline.truths.at(id), b->predicted_label,
                                   p->predicted_label, b->confidence, p->confidence,
                                   p->confidence - b->confidence});
  }
  return r;
}

}  // namespace bimhar
