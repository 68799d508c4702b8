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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bimhar/evaluation.hpp"
#include "bimhar/kernels.hpp"
#include "bimhar/label_registry.hpp"
#include "bimhar/scoring.hpp"

namespace bimhar {

// Prediction stream: one JSON object per line, keys in a fixed order.
//   {"clip_id", "timestamp", "ground_truth", "label_space", "restriction",
//    "distribution", "predicted", "confidence", "config"}
// Clips that failed are written as {"clip_id", "error": {"kind", "message"}}
// and an optional first line {"meta": {...}} carries run metadata.

std::string prediction_to_line(const Prediction& prediction);
std::string failure_to_line(const kernels::ClipFailure& failure);
std::string meta_line(std::string_view generator, std::string_view generated_at);

struct PredictionFile {
  /// Registry the label spaces refer to: the caller's, or one derived from
  /// the labels seen in the file (first-appearance order) when none is given.
  LabelRegistry registry;
  std::vector<Prediction> predictions;
  std::vector<kernels::ClipFailure> failures;
};

/// Parses a prediction stream. Each record is checked: distribution aligned
/// with its label space and summing to 1, predicted label = argmax,
/// confidence = max probability. Violations throw ValidationError naming the
/// clip; malformed lines throw ParseError with the line number.
PredictionFile read_prediction_records(std::string_view document,
                                       const LabelRegistry* registry = nullptr);

/// Report object: metrics, confidence statistics, warnings and an echo of
/// the scoring configurations found in the run. Full precision.
std::string run_report_to_json(const RunReport& report, const std::vector<ScoringConfig>& configs);
std::string comparison_to_json(const ComparisonReport& report);

/// Human-readable table (accuracy as a percentage, other metrics to two
/// decimals) with one row per named run.
std::string render_table(const std::vector<std::pair<std::string, const RunReport*>>& rows);

/// Distinct scoring configurations in first-appearance order.
std::vector<ScoringConfig> distinct_configs(std::span<const Prediction> predictions);

}  // namespace bimhar
