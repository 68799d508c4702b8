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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bimhar/error.hpp"
#include "bimhar/label_registry.hpp"
#include "bimhar/schedule.hpp"

namespace bimhar::testing {

inline std::string fixture(const std::string& relative) {
  return std::string(BIMHAR_FIXTURE_DIR) + "/" + relative;
}

inline LabelRegistry table1_registry() {
  return load_registry(read_file(fixture("table1_registry.json")));
}

inline Schedule site_schedule() { return parse_schedule(read_file(fixture("site_schedule.json"))); }

inline Schedule overlap_schedule() {
  return parse_schedule(read_file(fixture("overlap_schedule.json")));
}

inline LabelRegistry registry_of(const std::vector<std::string>& ids,
                                 std::vector<TaskDefinition> tasks = {}) {
  std::vector<ActivityLabel> labels;
  for (const auto& id : ids) labels.push_back({id, id, "a worker " + id});
  return LabelRegistry(std::move(labels), std::move(tasks));
}

// Seeded generator shared by the property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(engine_); }
  double normal() { return std::normal_distribution<double>()(engine_); }

  std::vector<double> vector(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bimhar::testing
