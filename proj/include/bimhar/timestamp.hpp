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

#include <chrono>
#include <string>
#include <string_view>

namespace bimhar {

/// Absolute instant on the UTC timeline, microsecond resolution.
using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;

/// Parses `YYYY-MM-DDTHH:MM:SS[.ffffff](Z|+HH:MM|-HH:MM)`. The UTC offset is
/// mandatory; a timestamp without one is a ParseError.
Timestamp parse_timestamp(std::string_view text);

/// Canonical form: UTC with a `Z` suffix, fractional seconds only when the
/// sub-second part is nonzero (always six digits then).
std::string format_timestamp(Timestamp t);

}  // namespace bimhar
