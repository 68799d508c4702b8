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

#include "bimhar/label_registry.hpp"

#include <algorithm>
#include <atomic>
#include <set>

#include "bimhar/error.hpp"
#include "json.hpp"

namespace bimhar {

namespace {

std::uint64_t next_registry_token() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

bool is_normalized_id(std::string_view id) {
  if (id.empty()) return false;
  return std::none_of(id.begin(), id.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' ||
           (c >= 'A' && c <= 'Z');
  });
}

std::string squote(std::string_view s) { return "'" + std::string(s) + "'"; }

}  // namespace

std::string_view to_string(ProvenanceKind kind) {
  switch (kind) {
    case ProvenanceKind::kFull: return "full";
    case ProvenanceKind::kTask: return "task";
    case ProvenanceKind::kUnion: return "union";
    case ProvenanceKind::kFallback: return "fallback";
  }
  return "full";
}

ProvenanceKind provenance_from_string(std::string_view text) {
  if (text == "full") return ProvenanceKind::kFull;
  if (text == "task") return ProvenanceKind::kTask;
  if (text == "union") return ProvenanceKind::kUnion;
  if (text == "fallback") return ProvenanceKind::kFallback;
  throw ParseError("unknown label-space provenance " + squote(text));
}

bool LabelSpace::contains(std::size_t registry_index) const {
  return std::binary_search(indices_.begin(), indices_.end(), registry_index);
}

bool LabelSpace::contains(std::string_view label_id) const {
  return std::find(ids_.begin(), ids_.end(), label_id) != ids_.end();
}

std::optional<std::size_t> LabelSpace::position_of(std::size_t registry_index) const {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), registry_index);
  if (it == indices_.end() || *it != registry_index) return std::nullopt;
  return static_cast<std::size_t>(it - indices_.begin());
}

bool LabelSpace::is_subset_of(const LabelSpace& other) const {
  return registry_token_ == other.registry_token_ &&
         std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(),
                       indices_.end());
}

bool LabelSpace::same_labels(const LabelSpace& other) const {
  return registry_token_ == other.registry_token_ && indices_ == other.indices_;
}

LabelRegistry::LabelRegistry(std::vector<ActivityLabel> labels, std::vector<TaskDefinition> tasks)
    : labels_(std::move(labels)), tasks_(std::move(tasks)), token_(next_registry_token()) {
  std::vector<std::string> issues;
  if (labels_.empty()) issues.emplace_back("registry has no labels");

  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto& label = labels_[i];
    if (!is_normalized_id(label.id)) {
      issues.push_back("label " + squote(label.id) +
                       ": id must be a nonempty lowercase token without whitespace");
    }
    if (label.prompt.empty()) issues.push_back("label " + squote(label.id) + ": empty prompt");
    if (!label_index_.emplace(label.id, i).second) {
      issues.push_back("duplicate label id " + squote(label.id));
    }
  }

  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    const auto& task = tasks_[i];
    if (task.id.empty()) issues.push_back("task #" + std::to_string(i) + ": empty id");
    if (!task_index_.emplace(task.id, i).second) {
      issues.push_back("duplicate task id " + squote(task.id));
    }
    if (task.activity_ids.empty()) {
      issues.push_back("task " + squote(task.id) + ": no activities");
    }
    std::set<std::string_view> seen;
    for (const auto& activity : task.activity_ids) {
      if (!seen.insert(activity).second) {
        issues.push_back("task " + squote(task.id) + ": duplicate activity " + squote(activity));
      }
      if (!label_index_.contains(activity)) {
        issues.push_back("task " + squote(task.id) + ": unknown activity " + squote(activity));
      }
    }
  }

  if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::optional<std::size_t> LabelRegistry::index_of(std::string_view label_id) const {
  auto it = label_index_.find(std::string(label_id));
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

const TaskDefinition* LabelRegistry::find_task(std::string_view task_id) const {
  auto it = task_index_.find(std::string(task_id));
  return it == task_index_.end() ? nullptr : &tasks_[it->second];
}

std::vector<std::string> LabelRegistry::label_ids() const {
  std::vector<std::string> ids;
  ids.reserve(labels_.size());
  for (const auto& label : labels_) ids.push_back(label.id);
  return ids;
}

LabelSpace LabelRegistry::space_from_indices(std::vector<std::size_t> indices,
                                             Provenance provenance) const {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  std::sort(provenance.task_ids.begin(), provenance.task_ids.end());
  provenance.task_ids.erase(std::unique(provenance.task_ids.begin(), provenance.task_ids.end()),
                            provenance.task_ids.end());

  LabelSpace space;
  space.registry_token_ = token_;
  space.ids_.reserve(indices.size());
  for (auto i : indices) space.ids_.push_back(labels_[i].id);
  space.indices_ = std::move(indices);
  space.provenance_ = std::move(provenance);
  return space;
}

LabelSpace LabelRegistry::full_space() const {
  std::vector<std::size_t> all(labels_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return space_from_indices(std::move(all), Provenance{ProvenanceKind::kFull, {}});
}

LabelSpace LabelRegistry::label_space_for_task(std::string_view task_id) const {
  const auto* task = find_task(task_id);
  if (task == nullptr) throw DomainError("unknown task id " + squote(task_id));
  return make_space(task->activity_ids, Provenance{ProvenanceKind::kTask, {task->id}});
}

LabelSpace LabelRegistry::make_space(std::span<const std::string> label_ids,
                                     Provenance provenance) const {
  std::vector<std::size_t> indices;
  indices.reserve(label_ids.size());
  for (const auto& id : label_ids) {
    auto index = index_of(id);
    if (!index) throw DomainError("label " + squote(id) + " is not in the registry");
    indices.push_back(*index);
  }
  return space_from_indices(std::move(indices), std::move(provenance));
}

LabelSpace LabelRegistry::empty_fallback_space() const {
  return space_from_indices({}, Provenance{ProvenanceKind::kFallback, {}});
}

LabelRegistry load_registry(std::string_view document) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("registry: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("registry: top level must be an object");
  if (!doc.contains("labels") || !doc["labels"].is_array()) {
    throw ParseError("registry: missing 'labels' array");
  }

  auto string_field = [](const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
      throw ParseError("registry: " + where + ": missing string field '" + key + "'");
    }
    return it->get<std::string>();
  };

  std::vector<ActivityLabel> labels;
  for (std::size_t i = 0; i < doc["labels"].size(); ++i) {
    const auto& item = doc["labels"][i];
    std::string where = "labels[" + std::to_string(i) + "]";
    if (!item.is_object()) throw ParseError("registry: " + where + " must be an object");
    labels.push_back(ActivityLabel{string_field(item, "id", where),
                                   string_field(item, "display_name", where),
                                   string_field(item, "prompt", where)});
  }

  std::vector<TaskDefinition> tasks;
  if (auto it = doc.find("tasks"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("registry: 'tasks' must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& item = (*it)[i];
      std::string where = "tasks[" + std::to_string(i) + "]";
      if (!item.is_object()) throw ParseError("registry: " + where + " must be an object");
      TaskDefinition task{string_field(item, "id", where), string_field(item, "name", where), {}};
      auto acts = item.find("activities");
      if (acts == item.end() || !acts->is_array()) {
        throw ParseError("registry: " + where + ": missing 'activities' array");
      }
      for (const auto& a : *acts) {
        if (!a.is_string()) throw ParseError("registry: " + where + ": activity ids must be strings");
        task.activity_ids.push_back(a.get<std::string>());
      }
      tasks.push_back(std::move(task));
    }
  }
  return LabelRegistry(std::move(labels), std::move(tasks));
}

LabelSpace union_label_spaces(std::span<const LabelSpace> spaces, const LabelRegistry& registry) {
  if (spaces.empty()) throw DomainError("union of an empty list of label spaces");
  for (const auto& space : spaces) {
    if (space.registry_token() != registry.token()) {
      throw DomainError("label spaces drawn from different registries");
    }
  }
  if (spaces.size() == 1) return spaces.front();

  std::vector<std::string> ids;
  Provenance provenance{ProvenanceKind::kUnion, {}};
  bool saw_full = false;
  for (const auto& space : spaces) {
    ids.insert(ids.end(), space.ids().begin(), space.ids().end());
    const auto& p = space.provenance();
    if (p.kind == ProvenanceKind::kFull) saw_full = true;
    provenance.task_ids.insert(provenance.task_ids.end(), p.task_ids.begin(), p.task_ids.end());
  }
  auto merged = registry.make_space(ids, provenance);
  if (saw_full) return registry.full_space();
  return merged;
}

}  // namespace bimhar
