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

// Data-parallel kernels. Each kernel has a serial reference (`*_serial`) and
// an OpenMP version (`*_parallel`); the unsuffixed entry point dispatches to
// the parallel one. Per-item arithmetic is identical in both, so results
// match bit for bit regardless of thread count.

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bimhar/embedding_store.hpp"
#include "bimhar/error.hpp"
#include "bimhar/evaluation.hpp"
#include "bimhar/scoring.hpp"

namespace bimhar::kernels {

/// Dot product of two unit vectors, clamped to [-1, 1].
double unit_dot(std::span<const double> a, std::span<const double> b);

struct SimilarityMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Cosine similarity of every (row, col) pair; inputs must be normalized.
SimilarityMatrix similarity_matrix_serial(std::span<const EmbeddingVector> rows,
                                          std::span<const EmbeddingVector> cols);
SimilarityMatrix similarity_matrix_parallel(std::span<const EmbeddingVector> rows,
                                            std::span<const EmbeddingVector> cols);
SimilarityMatrix similarity_matrix(std::span<const EmbeddingVector> rows,
                                   std::span<const EmbeddingVector> cols);

struct ClipFailure {
  std::string clip_id;
  ErrorKind kind = ErrorKind::kDomain;
  std::string message;
};

using ClipOutcome = std::variant<Prediction, ClipFailure>;

/// predict() for every clip. Failures are captured per clip; outcomes keep
/// input order.
std::vector<ClipOutcome> predict_batch_serial(std::span<const ClipRecord> clips,
                                              const ClassEmbeddingTable& table,
                                              const Schedule& schedule,
                                              const LabelRegistry& registry,
                                              const ScoringConfig& config);
std::vector<ClipOutcome> predict_batch_parallel(std::span<const ClipRecord> clips,
                                                const ClassEmbeddingTable& table,
                                                const Schedule& schedule,
                                                const LabelRegistry& registry,
                                                const ScoringConfig& config);
std::vector<ClipOutcome> predict_batch(std::span<const ClipRecord> clips,
                                       const ClassEmbeddingTable& table, const Schedule& schedule,
                                       const LabelRegistry& registry, const ScoringConfig& config);

/// Confusion counts from (truth index, predicted index) pairs. The parallel
/// version accumulates per-thread partial matrices and merges them.
ConfusionMatrix accumulate_confusion_serial(std::vector<std::string> labels,
                                            std::span<const LabelPair> pairs);
ConfusionMatrix accumulate_confusion_parallel(std::vector<std::string> labels,
                                              std::span<const LabelPair> pairs);

}  // namespace bimhar::kernels
