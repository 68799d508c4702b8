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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bimhar {

struct ActivityLabel {
  std::string id;            // lowercase token, no whitespace
  std::string display_name;
  std::string prompt;        // text fed to the class-prompt encoder
};

struct TaskDefinition {
  std::string id;
  std::string name;
  std::vector<std::string> activity_ids;
};

enum class ProvenanceKind { kFull, kTask, kUnion, kFallback };

std::string_view to_string(ProvenanceKind kind);
ProvenanceKind provenance_from_string(std::string_view text);

struct Provenance {
  ProvenanceKind kind = ProvenanceKind::kFull;
  std::vector<std::string> task_ids;  // sorted; empty for full/fallback

  bool operator==(const Provenance&) const = default;
};

class LabelRegistry;

/// Ordered subset of a registry's label universe. Labels are always held in
/// registry order, so equal sets compare and serialize identically.
class LabelSpace {
 public:
  LabelSpace() = default;

  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }

  /// Registry indices, strictly increasing.
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  /// Label ids aligned with indices().
  std::span<const std::string> ids() const noexcept { return ids_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  std::uint64_t registry_token() const noexcept { return registry_token_; }

  bool contains(std::size_t registry_index) const;
  bool contains(std::string_view label_id) const;
  /// Position of a registry index inside this space.
  std::optional<std::size_t> position_of(std::size_t registry_index) const;
  bool is_subset_of(const LabelSpace& other) const;

  /// Same registry and same labels; provenance is not compared.
  bool same_labels(const LabelSpace& other) const;

 private:
  friend class LabelRegistry;

  std::uint64_t registry_token_ = 0;
  std::vector<std::size_t> indices_;
  std::vector<std::string> ids_;
  Provenance provenance_;
};

/// Label universe and task -> activity-set mapping. Immutable after
/// construction; copies share the registry token, so label spaces built from
/// either copy are interchangeable.
class LabelRegistry {
 public:
  /// Validates every invariant and throws ValidationError listing all
  /// violations (duplicate ids, dangling activity references, ...).
  LabelRegistry(std::vector<ActivityLabel> labels, std::vector<TaskDefinition> tasks);

  std::span<const ActivityLabel> labels() const noexcept { return labels_; }
  std::span<const TaskDefinition> tasks() const noexcept { return tasks_; }
  std::uint64_t token() const noexcept { return token_; }

  std::optional<std::size_t> index_of(std::string_view label_id) const;
  const TaskDefinition* find_task(std::string_view task_id) const;
  std::vector<std::string> label_ids() const;

  LabelSpace full_space() const;
  /// Throws DomainError for an unknown task id.
  LabelSpace label_space_for_task(std::string_view task_id) const;
  /// Builds a space from arbitrary label ids (any order, duplicates allowed).
  /// Throws DomainError naming the first unknown id.
  LabelSpace make_space(std::span<const std::string> label_ids, Provenance provenance) const;
  LabelSpace empty_fallback_space() const;

 private:
  LabelSpace space_from_indices(std::vector<std::size_t> indices, Provenance provenance) const;

  std::vector<ActivityLabel> labels_;
  std::vector<TaskDefinition> tasks_;
  std::unordered_map<std::string, std::size_t> label_index_;
  std::unordered_map<std::string, std::size_t> task_index_;
  std::uint64_t token_;
};

/// Parses the registry JSON document (`labels` + optional `tasks`).
/// ParseError for malformed documents, ValidationError for invariant
/// violations; both name the offending entity.
LabelRegistry load_registry(std::string_view document);

/// Set union in canonical registry order with provenance union(task ids).
/// Absorbs full spaces: a union including the full universe is the full
/// space. Throws DomainError on empty input or mixed registries.
LabelSpace union_label_spaces(std::span<const LabelSpace> spaces, const LabelRegistry& registry);

}  // namespace bimhar
