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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bimhar/embedding_store.hpp"
#include "bimhar/label_registry.hpp"
#include "bimhar/schedule.hpp"

namespace bimhar {

enum class RestrictionMode { kOff, kHard, kSoft };

std::string_view to_string(RestrictionMode mode);
RestrictionMode restriction_mode_from_string(std::string_view text);

inline constexpr double kDefaultTemperature = 0.01;

struct ScoringConfig {
  double tau = kDefaultTemperature;
  RestrictionMode mode = RestrictionMode::kOff;
  double penalty_lambda = 0.0;  // soft mode only
  FallbackPolicy fallback = FallbackPolicy::kFullSpace;

  /// Throws ValidationError unless tau > 0 and penalty_lambda >= 0 (both finite).
  void validate() const;
};

/// Scores aligned with a label space's canonical order.
struct LogitVector {
  std::vector<double> values;
  LabelSpace space;
};

struct Prediction {
  std::string clip_id;
  Timestamp timestamp;
  std::optional<std::string> ground_truth;
  LabelSpace label_space;                 // the space `distribution` is aligned with
  std::optional<LabelSpace> restriction;  // schedule-resolved space; absent in off mode
  std::vector<double> distribution;
  std::string predicted_label;
  double confidence = 0.0;
  ScoringConfig config;
};

/// Dot product of the normalized inputs, clamped to [-1, 1].
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// logit_c = sim(clip, class_c) / tau for every c in `space`, in space order.
LogitVector compute_logits(const EmbeddingVector& clip, const ClassEmbeddingTable& table,
                           const LabelSpace& space, double tau);

/// Max-subtracted softmax. Throws DomainError on empty or non-finite input.
std::vector<double> softmax(std::span<const double> logits);

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

/// Logits recomputed over `restricted` only; the out-of-space classes are
/// removed rather than masked. Requires restricted to be a nonempty subset of
/// full.
LogitVector restrict_hard(const ClassEmbeddingTable& table, const EmbeddingVector& clip,
                          const LabelSpace& full, const LabelSpace& restricted, double tau);

/// Drops the entries of an existing logit vector that fall outside
/// `restricted`. Same result as restrict_hard on the same inputs.
LogitVector select_logits(const LogitVector& logits, const LabelSpace& restricted);

/// Subtracts lambda from every logit outside `restricted`; the space is
/// unchanged.
LogitVector restrict_soft(const LogitVector& logits, const LabelSpace& restricted, double lambda);

/// Full pipeline for one clip: resolve the label space at the clip's
/// timestamp (mode off skips the schedule), score, softmax, argmax.
Prediction predict(const ClipRecord& clip, const ClassEmbeddingTable& table,
                   const Schedule& schedule, const LabelRegistry& registry,
                   const ScoringConfig& config);

using EmbeddingPair = std::pair<EmbeddingVector, EmbeddingVector>;

/// Contrastive InfoNCE loss over a batch of (video, text) pairs with in-batch
/// negatives. Evaluated only; nothing is optimized.
double info_nce(std::span<const EmbeddingPair> pairs, double tau);

}  // namespace bimhar
