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
#include "support.hpp"

using namespace bimhar;
using bimhar::testing::Rng;

namespace {

std::vector<EmbeddingVector> unit_vectors(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<EmbeddingVector> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(normalize(EmbeddingVector(rng.vector(d, -1, 1))));
  return out;
}

}  // namespace

TEST_CASE("similarity matrix: serial and parallel agree") {
  Rng rng(59);
  for (int trial = 0; trial < 20; ++trial) {
    auto rows = unit_vectors(rng, rng.index(1, 40), 16);
    auto cols = unit_vectors(rng, rng.index(1, 20), 16);
    auto a = kernels::similarity_matrix_serial(rows, cols);
    auto b = kernels::similarity_matrix_parallel(rows, cols);
    CHECK(a.rows == rows.size());
    CHECK(a.cols == cols.size());
    CHECK(a.data == b.data);
    CHECK(a.at(0, 0) == cosine_similarity(rows[0], cols[0]));
  }
}

TEST_CASE("similarity matrix rejects raw or mismatched vectors") {
  std::vector<EmbeddingVector> raw{EmbeddingVector({2.0, 0.0})};
  std::vector<EmbeddingVector> unit{normalize(EmbeddingVector({1.0, 0.0}))};
  std::vector<EmbeddingVector> wide{normalize(EmbeddingVector({1.0, 0.0, 0.0}))};
  CHECK_THROWS_AS(kernels::similarity_matrix(raw, unit), DomainError);
  CHECK_THROWS_AS(kernels::similarity_matrix(unit, wide), DomainError);
}

TEST_CASE("batch prediction: serial and parallel agree") {
  auto reg = bimhar::testing::table1_registry();
  auto schedule = bimhar::testing::site_schedule();
  auto table = read_embedding_table(read_file(bimhar::testing::fixture("synthetic/classes.emb")));
  auto clips = read_clip_set(read_file(bimhar::testing::fixture("synthetic/clips.emb")));

  for (auto mode : {RestrictionMode::kOff, RestrictionMode::kHard, RestrictionMode::kSoft}) {
    ScoringConfig cfg;
    cfg.mode = mode;
    cfg.penalty_lambda = 3.0;
    auto a = kernels::predict_batch_serial(clips.clips, table, schedule, reg, cfg);
    auto b = kernels::predict_batch_parallel(clips.clips, table, schedule, reg, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto& pa = std::get<Prediction>(a[i]);
      const auto& pb = std::get<Prediction>(b[i]);
      CHECK(pa.clip_id == pb.clip_id);
      CHECK(pa.distribution == pb.distribution);
      CHECK(pa.predicted_label == pb.predicted_label);
    }
  }
}

TEST_CASE("batch prediction captures per-clip failures") {
  auto reg = bimhar::testing::table1_registry();
  auto table = read_embedding_table(read_file(bimhar::testing::fixture("synthetic/classes.emb")));
  std::vector<float> raw(32, 0.1f);
  std::vector<ClipRecord> clips{
      make_clip("in", parse_timestamp("2023-06-05T09:00:00-07:00"), std::nullopt, raw),
      make_clip("gap", parse_timestamp("2023-06-05T23:00:00-07:00"), std::nullopt, raw)};
  ScoringConfig cfg;
  cfg.mode = RestrictionMode::kHard;
  cfg.fallback = FallbackPolicy::kError;
  for (auto out : {kernels::predict_batch_serial(clips, table, bimhar::testing::site_schedule(), reg, cfg),
                   kernels::predict_batch_parallel(clips, table, bimhar::testing::site_schedule(), reg, cfg)}) {
    REQUIRE(out.size() == 2);
    CHECK(std::holds_alternative<Prediction>(out[0]));
    REQUIRE(std::holds_alternative<kernels::ClipFailure>(out[1]));
    CHECK(std::get<kernels::ClipFailure>(out[1]).clip_id == "gap");
    CHECK(std::get<kernels::ClipFailure>(out[1]).kind == ErrorKind::kDomain);
  }
}

TEST_CASE("confusion accumulation: serial and parallel agree") {
  Rng rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t k = rng.index(1, 12);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < k; ++i) labels.push_back("c" + std::to_string(i));
    std::vector<LabelPair> pairs;
    for (std::size_t n = rng.index(0, 5000); n > 0; --n) pairs.push_back({rng.index(0, k - 1), rng.index(0, k - 1)});
    auto a = kernels::accumulate_confusion_serial(labels, pairs);
    auto b = kernels::accumulate_confusion_parallel(labels, pairs);
    CHECK(a == b);
    CHECK(a.total() == pairs.size());
  }
  std::vector<LabelPair> bad{{0, 3}};
  CHECK_THROWS_AS(kernels::accumulate_confusion_parallel({"a", "b"}, bad), DomainError);
}
