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

#include "bimhar/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "bimhar/error.hpp"
#include "bimhar/kernels.hpp"

namespace bimhar {

std::string_view to_string(RestrictionMode mode) {
  switch (mode) {
    case RestrictionMode::kOff: return "off";
    case RestrictionMode::kHard: return "hard";
    case RestrictionMode::kSoft: return "soft";
  }
  return "off";
}

RestrictionMode restriction_mode_from_string(std::string_view text) {
  if (text == "off") return RestrictionMode::kOff;
  if (text == "hard") return RestrictionMode::kHard;
  if (text == "soft") return RestrictionMode::kSoft;
  throw ParseError("unknown restriction mode '" + std::string(text) + "'");
}

void ScoringConfig::validate() const {
  std::vector<std::string> issues;
  if (!(std::isfinite(tau) && tau > 0.0)) issues.push_back("tau must be a positive finite number");
  if (!(std::isfinite(penalty_lambda) && penalty_lambda >= 0.0)) {
    issues.push_back("lambda must be a nonnegative finite number");
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw DomainError("cosine_similarity: dimension mismatch (" + std::to_string(a.dimension()) +
                      " vs " + std::to_string(b.dimension()) + ")");
  }
  if (a.normalized() && b.normalized()) return kernels::unit_dot(a.values(), b.values());
  auto ua = normalize(a);
  auto ub = normalize(b);
  return kernels::unit_dot(ua.values(), ub.values());
}

LogitVector compute_logits(const EmbeddingVector& clip, const ClassEmbeddingTable& table,
                           const LabelSpace& space, double tau) {
  if (!(std::isfinite(tau) && tau > 0.0)) throw ValidationError("tau must be positive");
  if (clip.dimension() != table.dimension()) {
    throw DomainError("clip dimension " + std::to_string(clip.dimension()) +
                      " does not match class table dimension " + std::to_string(table.dimension()));
  }
  LogitVector out{{}, space};
  out.values.reserve(space.size());
  for (const auto& id : space.ids()) {
    const auto* entry = table.find(id);
    if (entry == nullptr) throw DomainError("no class embedding for label '" + id + "'");
    out.values.push_back(cosine_similarity(clip, entry->unit) / tau);
  }
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw DomainError("softmax of an empty vector");
  double max = logits.front();
  for (double l : logits) {
    if (!std::isfinite(l)) throw DomainError("softmax input is not finite");
    max = std::max(max, l);
  }
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    sum += out[i];
  }
  for (auto& p : out) p /= sum;
  return out;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw DomainError("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

LogitVector restrict_hard(const ClassEmbeddingTable& table, const EmbeddingVector& clip,
                          const LabelSpace& full, const LabelSpace& restricted, double tau) {
  if (restricted.empty()) throw DomainError("hard restriction to an empty label space");
  if (!restricted.is_subset_of(full)) {
    throw DomainError("restricted label space is not a subset of the full space");
  }
  return compute_logits(clip, table, restricted, tau);
}

LogitVector select_logits(const LogitVector& logits, const LabelSpace& restricted) {
  if (restricted.empty()) throw DomainError("hard restriction to an empty label space");
  if (!restricted.is_subset_of(logits.space)) {
    throw DomainError("restricted label space is not a subset of the logit space");
  }
  LogitVector out{{}, restricted};
  out.values.reserve(restricted.size());
  for (auto index : restricted.indices()) {
    out.values.push_back(logits.values[*logits.space.position_of(index)]);
  }
  return out;
}

LogitVector restrict_soft(const LogitVector& logits, const LabelSpace& restricted, double lambda) {
  if (!(std::isfinite(lambda) && lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
  if (!restricted.is_subset_of(logits.space)) {
    throw DomainError("restricted label space is not a subset of the logit space");
  }
  LogitVector out = logits;
  if (lambda == 0.0) return out;
  auto indices = logits.space.indices();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (!restricted.contains(indices[i])) out.values[i] -= lambda;
  }
  return out;
}

Prediction predict(const ClipRecord& clip, const ClassEmbeddingTable& table,
                   const Schedule& schedule, const LabelRegistry& registry,
                   const ScoringConfig& config) {
  config.validate();
  Prediction p;
  p.clip_id = clip.clip_id;
  p.timestamp = clip.timestamp;
  p.ground_truth = clip.ground_truth;
  p.config = config;

  const auto full = registry.full_space();
  LogitVector logits;
  switch (config.mode) {
    case RestrictionMode::kOff:
      logits = compute_logits(clip.embedding, table, full, config.tau);
      break;
    case RestrictionMode::kHard: {
      auto resolved = resolve_label_space(schedule, registry, clip.timestamp, config.fallback);
      if (resolved.empty()) {
        throw DomainError("clip '" + clip.clip_id + "': resolved label space is empty");
      }
      logits = restrict_hard(table, clip.embedding, full, resolved, config.tau);
      p.restriction = std::move(resolved);
      break;
    }
    case RestrictionMode::kSoft: {
      auto resolved = resolve_label_space(schedule, registry, clip.timestamp, config.fallback);
      if (resolved.empty()) {
        throw DomainError("clip '" + clip.clip_id + "': resolved label space is empty");
      }
      logits = restrict_soft(compute_logits(clip.embedding, table, full, config.tau), resolved,
                             config.penalty_lambda);
      p.restriction = std::move(resolved);
      break;
    }
  }

  p.distribution = softmax(logits.values);
  auto best = argmax(p.distribution);
  p.predicted_label = logits.space.ids()[best];
  p.confidence = p.distribution[best];
  p.label_space = std::move(logits.space);
  return p;
}

double info_nce(std::span<const EmbeddingPair> pairs, double tau) {
  if (pairs.empty()) throw DomainError("info_nce: empty batch");
  if (!(std::isfinite(tau) && tau > 0.0)) throw ValidationError("tau must be positive");
  const std::size_t dim = pairs.front().first.dimension();
  std::vector<EmbeddingVector> videos, texts;
  videos.reserve(pairs.size());
  texts.reserve(pairs.size());
  for (const auto& [x, y] : pairs) {
    if (x.dimension() != dim || y.dimension() != dim) {
      throw DomainError("info_nce: dimension mismatch within the batch");
    }
    videos.push_back(normalize(x));
    texts.push_back(normalize(y));
  }

  auto sim = kernels::similarity_matrix(videos, texts);
  const std::size_t n = pairs.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // -log softmax_i(i) = (m - l_ii) + log sum_j exp(l_ij - m), both terms >= 0
    double max = sim.at(i, 0) / tau;
    for (std::size_t j = 1; j < n; ++j) max = std::max(max, sim.at(i, j) / tau);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += std::exp(sim.at(i, j) / tau - max);
    total += (max - sim.at(i, i) / tau) + std::log(sum);
  }
  return total / static_cast<double>(n);
}

}  // namespace bimhar
