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

#include <doctest.h>

#include <string>
#include <variant>
#include <vector>

#include "bimhar/kernels.hpp"
#include "bimhar/records.hpp"
#include "support.hpp"

using namespace bimhar;

namespace {

std::vector<Prediction> synthetic_predictions(const LabelRegistry& reg, ScoringConfig cfg) {
  auto table = read_embedding_table(read_file(bimhar::testing::fixture("synthetic/classes.emb")));
  auto clips = read_clip_set(read_file(bimhar::testing::fixture("synthetic/clips.emb")));
  std::vector<Prediction> out;
  for (auto& o : kernels::predict_batch(clips.clips, table, bimhar::testing::site_schedule(), reg, cfg)) {
    out.push_back(std::get<Prediction>(std::move(o)));
  }
  return out;
}

}  // namespace

TEST_CASE("prediction records round trip") {
  auto reg = bimhar::testing::table1_registry();
  for (auto mode : {RestrictionMode::kOff, RestrictionMode::kHard, RestrictionMode::kSoft}) {
    ScoringConfig cfg;
    cfg.mode = mode;
    cfg.penalty_lambda = 2.5;
    auto preds = synthetic_predictions(reg, cfg);
    std::string doc;
    for (const auto& p : preds) doc += prediction_to_line(p) + "\n";

    auto file = read_prediction_records(doc, &reg);
    REQUIRE(file.predictions.size() == preds.size());
    CHECK(file.failures.empty());
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const auto& a = preds[i];
      const auto& b = file.predictions[i];
      CHECK(a.clip_id == b.clip_id);
      CHECK(a.timestamp == b.timestamp);
      CHECK(a.ground_truth == b.ground_truth);
      CHECK(a.distribution == b.distribution);
      CHECK(a.predicted_label == b.predicted_label);
      CHECK(a.confidence == b.confidence);
      CHECK(a.label_space.same_labels(b.label_space));
      CHECK(a.label_space.provenance() == b.label_space.provenance());
      CHECK(a.restriction.has_value() == b.restriction.has_value());
      CHECK(a.config.mode == b.config.mode);
      CHECK(a.config.tau == b.config.tau);
      CHECK(a.config.penalty_lambda == b.config.penalty_lambda);
      CHECK(prediction_to_line(b) == prediction_to_line(a));
    }
  }
}

TEST_CASE("records without a registry derive one") {
  auto file = read_prediction_records(read_file(bimhar::testing::fixture("table2/task1_hard.jsonl")));
  CHECK(file.predictions.size() == 14);
  CHECK(file.registry.labels().size() >= 6);
}

TEST_CASE("failure and meta lines") {
  kernels::ClipFailure f{"c9", ErrorKind::kDomain, "no scheduled task"};
  auto doc = meta_line("bimhar", "2026-01-01T00:00:00Z") + "\n" + failure_to_line(f) + "\n";
  auto file = read_prediction_records(doc);
  CHECK(file.predictions.empty());
  REQUIRE(file.failures.size() == 1);
  CHECK(file.failures[0].clip_id == "c9");
  CHECK(file.failures[0].message == "no scheduled task");
}

TEST_CASE("invalid records are rejected") {
  auto reg = bimhar::testing::registry_of({"a", "b"});
  auto line = [](const std::string& dist, const std::string& predicted, const std::string& conf) {
    return R"({"clip_id":"x","timestamp":"2023-01-01T00:00:00Z","ground_truth":"a",)"
           R"("label_space":{"provenance":"full","tasks":[],"labels":["a","b"]},"restriction":null,)"
           R"("distribution":)" + dist + R"(,"predicted":")" + predicted + R"(","confidence":)" + conf +
           R"(,"config":{"mode":"off","tau":0.01,"lambda":0.0,"fallback":"full_space"}})";
  };
  CHECK_NOTHROW(read_prediction_records(line("[0.75,0.25]", "a", "0.75"), &reg));
  CHECK_THROWS_AS(read_prediction_records(line("[0.7,0.25]", "a", "0.7"), &reg), ValidationError);
  CHECK_THROWS_AS(read_prediction_records(line("[0.75,0.25]", "b", "0.25"), &reg), ValidationError);
  CHECK_THROWS_AS(read_prediction_records(line("[0.75,0.25]", "a", "0.5"), &reg), ValidationError);
  CHECK_THROWS_AS(read_prediction_records(line("[0.75,0.25]", "z", "0.75"), &reg), ValidationError);
  CHECK_THROWS_AS(read_prediction_records(line("[1.0]", "a", "1.0"), &reg), ValidationError);
  CHECK_THROWS_AS(read_prediction_records("{not json", &reg), ParseError);
}

TEST_CASE("rendered table row for task 1 with restriction") {
  auto reg = bimhar::testing::table1_registry();
  auto file = read_prediction_records(read_file(bimhar::testing::fixture("table2/task1_hard.jsonl")), &reg);
  auto report = evaluate_run(RunArtifacts{file.predictions, truths_from_predictions(file.predictions)},
                             reg.label_ids());
  auto table = render_table({{"task1", &report}});
  CHECK(table.find("57.14%") != std::string::npos);
  CHECK(table.find("0.41") != std::string::npos);
  CHECK(table.find("0.57") != std::string::npos);
  CHECK(table.find("0.48") != std::string::npos);
}
