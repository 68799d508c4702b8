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

#include "bimhar/kernels.hpp"

#include <algorithm>
#include <omp.h>

namespace bimhar::kernels {

namespace {

void check_unit(std::span<const EmbeddingVector> vectors, const char* what) {
  for (const auto& v : vectors) {
    if (!v.normalized()) throw DomainError(std::string("similarity_matrix: ") + what + " not normalized");
  }
}

void check_dims(std::span<const EmbeddingVector> rows, std::span<const EmbeddingVector> cols) {
  check_unit(rows, "row vector");
  check_unit(cols, "column vector");
  if (rows.empty() || cols.empty()) return;
  const auto dim = rows.front().dimension();
  auto bad = [dim](const EmbeddingVector& v) { return v.dimension() != dim; };
  if (std::any_of(rows.begin(), rows.end(), bad) || std::any_of(cols.begin(), cols.end(), bad)) {
    throw DomainError("similarity_matrix: dimension mismatch");
  }
}

ClipOutcome predict_one(const ClipRecord& clip, const ClassEmbeddingTable& table,
                        const Schedule& schedule, const LabelRegistry& registry,
                        const ScoringConfig& config) {
  try {
    return predict(clip, table, schedule, registry, config);
  } catch (const Error& e) {
    return ClipFailure{clip.clip_id, e.kind(), e.what()};
  }
}

}  // namespace

double unit_dot(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot, -1.0, 1.0);
}

SimilarityMatrix similarity_matrix_serial(std::span<const EmbeddingVector> rows,
                                          std::span<const EmbeddingVector> cols) {
  check_dims(rows, cols);
  SimilarityMatrix m{rows.size(), cols.size(), std::vector<double>(rows.size() * cols.size())};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      m.data[i * m.cols + j] = unit_dot(rows[i].values(), cols[j].values());
    }
  }
  return m;
}

SimilarityMatrix similarity_matrix_parallel(std::span<const EmbeddingVector> rows,
                                            std::span<const EmbeddingVector> cols) {
  check_dims(rows, cols);
  SimilarityMatrix m{rows.size(), cols.size(), std::vector<double>(rows.size() * cols.size())};
  const auto n_rows = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n_rows; ++i) {
    const auto r = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      m.data[r * m.cols + j] = unit_dot(rows[r].values(), cols[j].values());
    }
  }
  return m;
}

SimilarityMatrix similarity_matrix(std::span<const EmbeddingVector> rows,
                                   std::span<const EmbeddingVector> cols) {
  return similarity_matrix_parallel(rows, cols);
}

std::vector<ClipOutcome> predict_batch_serial(std::span<const ClipRecord> clips,
                                              const ClassEmbeddingTable& table,
                                              const Schedule& schedule,
                                              const LabelRegistry& registry,
                                              const ScoringConfig& config) {
  std::vector<ClipOutcome> out;
  out.reserve(clips.size());
  for (const auto& clip : clips) out.push_back(predict_one(clip, table, schedule, registry, config));
  return out;
}

std::vector<ClipOutcome> predict_batch_parallel(std::span<const ClipRecord> clips,
                                                const ClassEmbeddingTable& table,
                                                const Schedule& schedule,
                                                const LabelRegistry& registry,
                                                const ScoringConfig& config) {
  std::vector<ClipOutcome> out(clips.size(), ClipFailure{});
  const auto n = static_cast<std::ptrdiff_t>(clips.size());
  // predict_one never throws, so no exception escapes the parallel region
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = predict_one(clips[k], table, schedule, registry, config);
  }
  return out;
}

std::vector<ClipOutcome> predict_batch(std::span<const ClipRecord> clips,
                                       const ClassEmbeddingTable& table, const Schedule& schedule,
                                       const LabelRegistry& registry, const ScoringConfig& config) {
  return predict_batch_parallel(clips, table, schedule, registry, config);
}

ConfusionMatrix accumulate_confusion_serial(std::vector<std::string> labels,
                                            std::span<const LabelPair> pairs) {
  ConfusionMatrix cm(std::move(labels));
  for (const auto& p : pairs) cm.add(p.truth, p.predicted);
  return cm;
}

ConfusionMatrix accumulate_confusion_parallel(std::vector<std::string> labels,
                                              std::span<const LabelPair> pairs) {
  const auto size = labels.size();
  for (const auto& p : pairs) {
    if (p.truth >= size || p.predicted >= size) throw DomainError("confusion index out of range");
  }
  ConfusionMatrix merged(labels);
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel
  {
    ConfusionMatrix partial(labels);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto& p = pairs[static_cast<std::size_t>(i)];
      partial.add(p.truth, p.predicted);
    }
#pragma omp critical(bimhar_confusion_merge)
    merged.merge(partial);
  }
  return merged;
}

}  // namespace bimhar::kernels
