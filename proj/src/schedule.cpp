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

#include "bimhar/schedule.hpp"

#include <algorithm>
#include <set>

#include "bimhar/error.hpp"
#include "json.hpp"

namespace bimhar {

std::string_view to_string(FallbackPolicy policy) {
  switch (policy) {
    case FallbackPolicy::kFullSpace: return "full_space";
    case FallbackPolicy::kError: return "error";
    case FallbackPolicy::kEmpty: return "empty";
  }
  return "full_space";
}

FallbackPolicy fallback_from_string(std::string_view text) {
  if (text == "full" || text == "full_space") return FallbackPolicy::kFullSpace;
  if (text == "error") return FallbackPolicy::kError;
  if (text == "empty") return FallbackPolicy::kEmpty;
  throw ParseError("unknown fallback policy '" + std::string(text) + "'");
}

Schedule::Schedule(std::vector<ScheduleEntry> entries) : entries_(std::move(entries)) {
  std::vector<std::string> issues;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.task_id.empty()) issues.push_back("entry #" + std::to_string(i) + ": empty task id");
    if (!(e.start < e.end)) {
      issues.push_back("entry #" + std::to_string(i) + " (task '" + e.task_id +
                       "'): start " + format_timestamp(e.start) + " is not before end " +
                       format_timestamp(e.end));
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.task_id != b.task_id) return a.task_id < b.task_id;
    return a.end < b.end;
  });
}

std::vector<std::string> Schedule::active_tasks_at(Timestamp t) const {
  std::vector<std::string> active;
  for (const auto& e : entries_) {
    if (e.start > t) break;  // sorted by start
    if (e.contains(t)) active.push_back(e.task_id);
  }
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  return active;
}

Schedule parse_schedule(std::string_view document) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("schedule: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    throw ParseError("schedule: missing 'entries' array");
  }

  std::vector<ScheduleEntry> entries;
  for (std::size_t i = 0; i < doc["entries"].size(); ++i) {
    const auto& item = doc["entries"][i];
    std::string where = "schedule: entries[" + std::to_string(i) + "]";
    if (!item.is_object()) throw ParseError(where + " must be an object");
    for (const char* key : {"task", "start", "end"}) {
      if (!item.contains(key) || !item[key].is_string()) {
        throw ParseError(where + ": missing string field '" + key + "'");
      }
    }
    try {
      entries.push_back(ScheduleEntry{item["task"].get<std::string>(),
                                      parse_timestamp(item["start"].get<std::string>()),
                                      parse_timestamp(item["end"].get<std::string>())});
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return Schedule(std::move(entries));
}

std::vector<std::string> dangling_task_references(const Schedule& schedule,
                                                  const LabelRegistry& registry) {
  std::set<std::string> missing;
  for (const auto& e : schedule.entries()) {
    if (registry.find_task(e.task_id) == nullptr) missing.insert(e.task_id);
  }
  std::vector<std::string> issues;
  for (const auto& id : missing) {
    issues.push_back("schedule references unknown task '" + id + "'");
  }
  return issues;
}

LabelSpace resolve_label_space(const Schedule& schedule, const LabelRegistry& registry,
                               Timestamp t, FallbackPolicy fallback) {
  if (auto dangling = dangling_task_references(schedule, registry); !dangling.empty()) {
    throw ValidationError(std::move(dangling));
  }

  auto active = schedule.active_tasks_at(t);
  if (active.empty()) {
    switch (fallback) {
      case FallbackPolicy::kFullSpace: {
        auto ids = registry.label_ids();
        return registry.make_space(ids, Provenance{ProvenanceKind::kFallback, {}});
      }
      case FallbackPolicy::kEmpty:
        return registry.empty_fallback_space();
      case FallbackPolicy::kError:
        break;
    }
    throw DomainError("no scheduled task is active at " + format_timestamp(t));
  }

  std::vector<LabelSpace> spaces;
  spaces.reserve(active.size());
  for (const auto& task_id : active) spaces.push_back(registry.label_space_for_task(task_id));
  return union_label_spaces(spaces, registry);
}

}  // namespace bimhar
