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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bimhar/scoring.hpp"

namespace bimhar {

struct LabelPair {
  std::size_t truth;
  std::size_t predicted;
};

/// Square count matrix, rows = truth, columns = prediction, indexed by the
/// label order given at construction (normally registry order). Partial
/// matrices over the same labels merge associatively.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  std::span<const std::string> labels() const noexcept { return labels_; }

  std::uint64_t count(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * labels_.size() + predicted];
  }
  void add(std::size_t truth, std::size_t predicted, std::uint64_t n = 1);
  /// Throws DomainError unless both matrices use the same labels.
  void merge(const ConfusionMatrix& other);

  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t support(std::size_t label) const;    // row sum
  std::uint64_t predicted(std::size_t label) const;  // column sum

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::uint64_t> counts_;
};

using TruthMap = std::map<std::string, std::string>;  // clip id -> label id

/// Ground truths carried by the predictions themselves.
TruthMap truths_from_predictions(std::span<const Prediction> predictions);

/// counts[truth][predicted] per clip. Throws ValidationError for a missing
/// truth (naming the clip), a truth or prediction outside `labels`, or a
/// repeated clip id.
ConfusionMatrix build_confusion(std::span<const Prediction> predictions, const TruthMap& truths,
                                std::vector<std::string> labels);

enum class Averaging { kWeighted, kMacro, kMicro };

std::string_view to_string(Averaging averaging);
Averaging averaging_from_string(std::string_view text);

struct AveragedMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
  std::uint64_t predicted = 0;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::uint64_t total = 0;
  std::uint64_t correct = 0;
  /// Classes that occur as truth or prediction, in label order.
  std::vector<ClassMetrics> per_class;
  AveragedMetrics macro;
  AveragedMetrics micro;
  AveragedMetrics weighted;
  Averaging averaging = Averaging::kWeighted;
  std::vector<std::string> warnings;

  const AveragedMetrics& headline() const;
};

/// Per-class precision/recall/F1 plus macro, micro and support-weighted
/// averages. Zero divisions yield 0 and a warning. Classes with neither
/// support nor predictions are left out of the averages.
MetricsReport compute_metrics(const ConfusionMatrix& cm, Averaging averaging = Averaging::kWeighted);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  double q1 = 0.0;  // linear-interpolated quartiles
  double q3 = 0.0;
};

/// Throws DomainError on empty input.
Summary summarize(std::span<const double> values);

struct ConfidenceStats {
  Summary all;
  std::optional<Summary> correct;  // absent when no prediction is correct
};

ConfidenceStats confidence_stats(std::span<const Prediction> predictions, const TruthMap& truths);

struct RunArtifacts {
  std::vector<Prediction> predictions;
  TruthMap truths;
};

struct RunReport {
  MetricsReport metrics;
  ConfidenceStats confidence;
};

RunReport evaluate_run(const RunArtifacts& run, std::vector<std::string> labels,
                       Averaging averaging = Averaging::kWeighted);

struct ClipDelta {
  std::string clip_id;
  std::string truth;
  std::string baseline_predicted;
  std::string restricted_predicted;
  double baseline_confidence = 0.0;
  double restricted_confidence = 0.0;
  double delta = 0.0;  // restricted - baseline
};

struct ComparisonReport {
  RunReport baseline;
  RunReport restricted;
  double accuracy_delta = 0.0;
  AveragedMetrics weighted_delta;
  AveragedMetrics macro_delta;
  AveragedMetrics micro_delta;
  double confidence_mean_delta = 0.0;
  std::optional<double> correct_confidence_mean_delta;
  std::vector<ClipDelta> per_clip;  // sorted by clip id
};

/// Paired reports and deltas (restricted - baseline). Both runs must cover
/// the same clip ids (ValidationError listing the symmetric difference) with
/// the same truths.
ComparisonReport compare_runs(const RunArtifacts& baseline, const RunArtifacts& restricted,
                              std::vector<std::string> labels,
                              Averaging averaging = Averaging::kWeighted);

}  // namespace bimhar
