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

#include <string>
#include <string_view>
#include <vector>

#include "bimhar/label_registry.hpp"
#include "bimhar/timestamp.hpp"

namespace bimhar {

/// One scheduled task window, half-open: [start, end).
struct ScheduleEntry {
  std::string task_id;
  Timestamp start;
  Timestamp end;

  bool contains(Timestamp t) const noexcept { return start <= t && t < end; }
};

/// What to do when no scheduled task covers an instant.
enum class FallbackPolicy { kFullSpace, kError, kEmpty };

std::string_view to_string(FallbackPolicy policy);
/// Accepts the CLI spellings `full`, `error`, `empty` (and `full_space`).
FallbackPolicy fallback_from_string(std::string_view text);

class Schedule {
 public:
  Schedule() = default;
  /// Validates start < end for every entry (ValidationError naming each
  /// offending entry) and sorts by (start, task_id).
  explicit Schedule(std::vector<ScheduleEntry> entries);

  const std::vector<ScheduleEntry>& entries() const noexcept { return entries_; }

  /// Task ids whose window contains t, sorted lexicographically, deduplicated.
  std::vector<std::string> active_tasks_at(Timestamp t) const;

 private:
  std::vector<ScheduleEntry> entries_;
};

/// Parses `{"entries": [{"task", "start", "end"}, ...]}`.
Schedule parse_schedule(std::string_view document);

/// Every scheduled task id that the registry does not define, one message
/// per distinct id.
std::vector<std::string> dangling_task_references(const Schedule& schedule,
                                                  const LabelRegistry& registry);

/// Label space permitted at instant t: the union of the active tasks' label
/// spaces, or the fallback when nothing is active.
LabelSpace resolve_label_space(const Schedule& schedule, const LabelRegistry& registry,
                               Timestamp t, FallbackPolicy fallback = FallbackPolicy::kFullSpace);

}  // namespace bimhar
