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
#include <unordered_map>
#include <vector>

#include "bimhar/timestamp.hpp"

namespace bimhar {

/// Finite real vector. `normalized` is set only by normalize()/mean_pool(),
/// which guarantee a Euclidean norm of 1 within 1e-9.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  /// Throws ValidationError on an empty or non-finite input.
  explicit EmbeddingVector(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t dimension() const noexcept { return values_.size(); }
  bool normalized() const noexcept { return normalized_; }

  double norm() const;

 private:
  friend EmbeddingVector normalize(const EmbeddingVector& v);

  std::vector<double> values_;
  bool normalized_ = false;
};

/// Unit-length copy. Throws DomainError when the norm is below 1e-12.
EmbeddingVector normalize(const EmbeddingVector& v);

/// Componentwise mean of the frames, then normalized. The result does not
/// depend on frame order, bit for bit.
EmbeddingVector mean_pool(std::span<const EmbeddingVector> frames);

struct ClassEmbedding {
  std::string label_id;
  std::vector<float> raw;  // as stored in the file
  EmbeddingVector unit;
};

class ClassEmbeddingTable {
 public:
  ClassEmbeddingTable() = default;
  /// Throws ValidationError on duplicate label ids or mixed dimensions.
  explicit ClassEmbeddingTable(std::vector<ClassEmbedding> entries);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::span<const ClassEmbedding> entries() const noexcept { return entries_; }
  const ClassEmbedding* find(std::string_view label_id) const;

 private:
  std::vector<ClassEmbedding> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dimension_ = 0;
};

struct ClipRecord {
  std::string clip_id;
  Timestamp timestamp;
  std::optional<std::string> ground_truth;
  std::vector<float> raw;
  EmbeddingVector embedding;  // normalized
};

struct ClipSet {
  std::size_t dimension = 0;
  std::vector<ClipRecord> clips;
};

/// Builds a ClipRecord from raw values, normalizing in double precision.
ClipRecord make_clip(std::string clip_id, Timestamp timestamp,
                     std::optional<std::string> ground_truth, std::vector<float> raw);
ClassEmbedding make_class_embedding(std::string label_id, std::vector<float> raw);

// Line-oriented text format:
//   dim=<D> kind=<class|clip>
//   <label_id>\t<v1> ... <vD>                                  (class)
//   <clip_id>\t<ISO-8601>\t<ground truth or ->\t<v1> ... <vD>  (clip)
// Values are written as shortest round-trip decimal floats.

ClassEmbeddingTable read_embedding_table(std::string_view document);

struct EmbeddingPairRecord {
  std::string pair_id;
  EmbeddingVector video;
  EmbeddingVector text;
};

/// `dim=<D> kind=pair` followed by `<pair_id>\t<video values>\t<text values>`.
/// Vectors are normalized on load.
std::vector<EmbeddingPairRecord> read_pair_set(std::string_view document);
/// An empty or whitespace-only document reads as an empty set.
ClipSet read_clip_set(std::string_view document);

std::string write_embedding_table(const ClassEmbeddingTable& table);
std::string write_clip_set(const ClipSet& set);

/// Shortest decimal representation that reads back to the same float.
std::string format_float(float value);

}  // namespace bimhar
