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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bimhar/evaluation.hpp"
#include "bimhar/records.hpp"
#include "bimhar/scoring.hpp"
#include "cli_harness.hpp"
#include "support.hpp"

using namespace bimhar;
using bimhar::testing::Rng;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

LabelRegistry numbered_registry(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("l" + std::to_string(i));
  return bimhar::testing::registry_of(ids);
}

// Random proper subset of [0, n) containing `probe`.
std::vector<std::string> proper_subset(Rng& rng, std::size_t n, std::size_t probe) {
  std::vector<std::string> keep;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == probe || rng.coin()) keep.push_back("l" + std::to_string(i));
    else ++dropped;
  }
  if (dropped == 0) {
    std::size_t victim = (probe + 1 + rng.index(0, n - 2)) % n;
    std::erase(keep, "l" + std::to_string(victim));
  }
  return keep;
}

struct SweepStats {
  int cases = 0;
  int monotone_violations = 0;
  int strict_checked = 0;
  int strict_violations = 0;
  int argmax_checked = 0;
  int argmax_violations = 0;
  double seconds = 0;
};

SweepStats restriction_sweep() {
  auto t0 = Clock::now();
  SweepStats s;
  Rng rng(20230605);
  for (; s.cases < 5000; ++s.cases) {
    std::size_t n = rng.index(2, 50);
    auto reg = numbered_registry(n);
    std::size_t probe = rng.index(0, n - 1);
    auto space = reg.make_space(proper_subset(rng, n, probe), {});
    LogitVector l{rng.vector(n, -100, 100), reg.full_space()};

    auto pf = softmax(l.values);
    auto ps = softmax(select_logits(l, space).values);
    double before = pf[probe];
    double after = ps[*space.position_of(probe)];
    if (after < before * (1 - 1e-12)) ++s.monotone_violations;

    // Removed share of the mass; strictness is observable once it exceeds
    // the relative tolerance.
    double removed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!space.contains(i)) removed += pf[i];
    }
    if (removed > 1e-12) {
      ++s.strict_checked;
      if (!(after > before)) ++s.strict_violations;
    }

    auto best = argmax(pf);
    if (auto pos = space.position_of(best)) {
      ++s.argmax_checked;
      if (argmax(ps) != *pos) ++s.argmax_violations;
    }
  }
  s.seconds = seconds_since(t0);
  return s;
}

Outcome monotonicity(const SweepStats& s) {
  Outcome o;
  o.pass = s.cases >= 1000 && s.monotone_violations == 0 && s.strict_violations == 0 && s.seconds < 5.0;
  o.detail = std::to_string(s.cases) + " cases, " + std::to_string(s.monotone_violations) +
             " violations, strict checked on " + std::to_string(s.strict_checked) + " with " +
             std::to_string(s.strict_violations) + " failures, " + fmt("%.3f s", s.seconds);
  return o;
}

Outcome argmax_preservation(const SweepStats& s) {
  Outcome o;
  o.pass = s.argmax_checked > 0 && s.argmax_violations == 0;
  o.detail = std::to_string(s.argmax_checked) + " cases with argmax in subset, " +
             std::to_string(s.argmax_violations) + " violations";
  return o;
}

Outcome soft_limits() {
  Rng rng(77);
  int zero_bad = 0, limit_bad = 0, monotone_bad = 0;
  double worst_limit = 0;
  for (int c = 0; c < 100; ++c) {
    std::size_t n = rng.index(2, 50);
    auto reg = numbered_registry(n);
    std::size_t probe = rng.index(0, n - 1);
    auto space = reg.make_space(proper_subset(rng, n, probe), {});
    LogitVector l{rng.vector(n, -100, 100), reg.full_space()};

    if (softmax(restrict_soft(l, space, 0.0).values) != softmax(l.values)) ++zero_bad;

    auto limit = softmax(restrict_soft(l, space, 1e9).values);
    auto hard = softmax(select_logits(l, space).values);
    for (std::size_t k = 0; k < space.size(); ++k) {
      double err = std::abs(limit[space.indices()[k]] - hard[k]);
      worst_limit = std::max(worst_limit, err);
      if (err > 1e-9) ++limit_bad;
    }

    std::vector<double> prev(n, 0.0);
    for (double lambda : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      auto p = softmax(restrict_soft(l, space, lambda).values);
      for (auto i : space.indices()) {
        if (p[i] < prev[i] * (1 - 1e-12)) ++monotone_bad;
        prev[i] = p[i];
      }
    }
  }
  Outcome o;
  o.pass = zero_bad == 0 && limit_bad == 0 && monotone_bad == 0;
  o.detail = "100 cases; lambda=0 mismatches " + std::to_string(zero_bad) + ", lambda=1e9 max error " +
             fmt("%.2e", worst_limit) + ", monotonicity violations " + std::to_string(monotone_bad);
  return o;
}

Outcome table2_arithmetic() {
  auto reg = bimhar::testing::table1_registry();
  struct Row {
    const char* file;
    double published_percent;
    std::uint64_t correct, total;
  };
  const Row rows[] = {{"task1_off", 35.71, 5, 14},
                      {"task1_hard", 57.14, 8, 14},
                      {"task2_off", 23.08, 3, 13},
                      {"task2_hard", 53.85, 7, 13}};
  Outcome o;
  double worst_pct = 0, worst_recall = 0;
  bool micro_exact = true;
  for (const auto& r : rows) {
    auto file = read_prediction_records(
        read_file(bimhar::testing::fixture(std::string("table2/") + r.file + ".jsonl")), &reg);
    auto m = evaluate_run({file.predictions, truths_from_predictions(file.predictions)}, reg.label_ids()).metrics;
    if (m.correct != r.correct || m.total != r.total) o.pass = false;
    worst_pct = std::max(worst_pct, std::abs(100 * m.accuracy - r.published_percent));
    worst_recall = std::max(worst_recall, std::abs(m.weighted.recall - m.accuracy));
    micro_exact = micro_exact && m.micro.precision == m.accuracy && m.micro.recall == m.accuracy;
  }

  Rng rng(500);
  for (int c = 0; c < 500; ++c) {
    std::size_t k = rng.index(1, 18);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < k; ++i) labels.push_back("c" + std::to_string(i));
    ConfusionMatrix cm(labels);
    cm.add(rng.index(0, k - 1), rng.index(0, k - 1));
    for (std::size_t n = rng.index(0, 200); n > 0; --n) cm.add(rng.index(0, k - 1), rng.index(0, k - 1));
    auto m = compute_metrics(cm);
    worst_recall = std::max(worst_recall, std::abs(m.weighted.recall - m.accuracy));
    micro_exact = micro_exact && m.micro.precision == m.accuracy && m.micro.recall == m.accuracy;
  }
  o.pass = o.pass && worst_pct <= 0.005 && worst_recall <= 1e-12 && micro_exact;
  o.detail = "max |accuracy - table| " + fmt("%.4f", worst_pct) + " pct points; max |weighted R - acc| " +
             fmt("%.1e", worst_recall) + " over 4 fixtures + 500 matrices; micro exact: " +
             (micro_exact ? "yes" : "no");
  return o;
}

Outcome label_space_fixtures() {
  auto reg = bimhar::testing::table1_registry();
  auto site = bimhar::testing::site_schedule();
  auto overlap = bimhar::testing::overlap_schedule();
  auto at = [](const char* t) { return parse_timestamp(t); };

  std::size_t t1 = reg.label_space_for_task("task-1").size();
  std::size_t t2 = reg.label_space_for_task("task-2").size();
  std::vector<LabelSpace> both{reg.label_space_for_task("task-1"), reg.label_space_for_task("task-2")};
  std::size_t u = union_label_spaces(both, reg).size();
  std::size_t full = reg.full_space().size();

  std::size_t r1 = resolve_label_space(site, reg, at("2023-06-05T09:00:00-07:00")).size();
  std::size_t r2 = resolve_label_space(site, reg, at("2023-06-06T09:00:00-07:00")).size();
  std::size_t ru = resolve_label_space(overlap, reg, at("2023-06-05T12:30:00-07:00")).size();
  std::size_t rf = resolve_label_space(site, reg, at("2023-06-05T20:00:00-07:00")).size();

  Outcome o;
  o.pass = t1 == 6 && t2 == 5 && u == 7 && full == 18 && r1 == 6 && r2 == 5 && ru == 7 && rf == 18;
  o.detail = "task-1 " + std::to_string(t1) + ", task-2 " + std::to_string(t2) + ", union " +
             std::to_string(u) + ", full " + std::to_string(full) + "; via schedule " + std::to_string(r1) +
             "/" + std::to_string(r2) + "/" + std::to_string(ru) + "/" + std::to_string(rf);
  return o;
}

Outcome infonce_diagnostic() {
  Rng rng(13);
  bool zero_exact = true;
  for (int c = 0; c < 100; ++c) {
    std::size_t d = rng.index(1, 32);
    std::vector<EmbeddingPair> one{{EmbeddingVector(rng.vector(d, -1, 1)), EmbeddingVector(rng.vector(d, -1, 1))}};
    zero_exact = zero_exact && info_nce(one, rng.uniform(0.01, 2)) == 0.0;
  }
  std::vector<EmbeddingPair> identity{{EmbeddingVector({1, 0}), EmbeddingVector({1, 0})},
                                      {EmbeddingVector({0, 1}), EmbeddingVector({0, 1})}};
  const double expected = 0.31326168751822286;  // ln(1 + 1/e)
  double loss = info_nce(identity, 1.0);
  Outcome o;
  o.pass = zero_exact && std::abs(loss - expected) <= 1e-9;
  o.detail = std::string("N=1 exactly 0: ") + (zero_exact ? "yes" : "no") + "; N=2 loss " +
             fmt("%.17g", loss) + ", error " + fmt("%.1e", std::abs(loss - expected));
  return o;
}

std::string predict_args(const std::string& mode) {
  using bimhar::testing::arg;
  using bimhar::testing::fixture;
  return "predict --registry " + arg(fixture("table1_registry.json")) + " --schedule " +
         arg(fixture("site_schedule.json")) + " --classes " + arg(fixture("synthetic/classes.emb")) +
         " --clips " + arg(fixture("synthetic/clips.emb")) + " --mode " + mode;
}

Outcome synthetic_lift() {
  using bimhar::testing::arg;
  bimhar::testing::ScratchDir dir("acceptance");
  auto t0 = Clock::now();
  auto off = bimhar::testing::run_cli(predict_args("off") + " --output " + arg(dir / "off.jsonl"));
  auto hard = bimhar::testing::run_cli(predict_args("hard") + " --output " + arg(dir / "hard.jsonl"));
  auto cmp = bimhar::testing::run_cli("compare --baseline " + arg(dir / "off.jsonl") + " --restricted " +
                                      arg(dir / "hard.jsonl"));
  double secs = seconds_since(t0);

  Outcome o;
  if (off.exit_code != 0 || hard.exit_code != 0 || cmp.exit_code != 0) {
    o.pass = false;
    o.detail = "CLI exit codes " + std::to_string(off.exit_code) + "/" + std::to_string(hard.exit_code) +
               "/" + std::to_string(cmp.exit_code);
    return o;
  }

  auto classes = read_embedding_table(read_file(bimhar::testing::fixture("synthetic/classes.emb")));
  auto reg = bimhar::testing::table1_registry();
  auto restricted = read_prediction_records(bimhar::testing::slurp(dir / "hard.jsonl"), &reg);
  auto baseline = read_prediction_records(bimhar::testing::slurp(dir / "off.jsonl"), &reg);

  std::size_t off_task = 0;
  for (std::size_t i = 0; i < baseline.predictions.size(); ++i) {
    const auto& space = *restricted.predictions[i].restriction;
    if (!space.contains(baseline.predictions[i].predicted_label)) ++off_task;
  }
  std::size_t clips = baseline.predictions.size();
  double share = clips ? static_cast<double>(off_task) / clips : 0;

  auto report = nlohmann::json::parse(cmp.out);
  double acc_off = report["baseline"]["metrics"]["accuracy"];
  double acc_hard = report["restricted"]["metrics"]["accuracy"];
  std::size_t not_higher = 0;
  double min_delta = INFINITY;
  for (const auto& c : report["per_clip"]) {
    double d = c["confidence_delta"];
    min_delta = std::min(min_delta, d);
    if (!(d > 0)) ++not_higher;
  }

  o.pass = classes.dimension() == 32 && classes.size() == 18 && clips >= 50 && share >= 0.30 &&
           acc_hard >= acc_off && not_higher == 0 && secs < 10.0;
  o.detail = std::to_string(clips) + " clips, D=" + std::to_string(classes.dimension()) + ", off-task argmax " +
             fmt("%.1f%%", 100 * share) + ", accuracy " + fmt("%.2f%%", 100 * acc_off) + " -> " +
             fmt("%.2f%%", 100 * acc_hard) + ", clips without lift " + std::to_string(not_higher) +
             ", min delta " + fmt("%.3g", min_delta) + ", " + fmt("%.3f s", secs);
  return o;
}

Outcome determinism() {
  auto a = bimhar::testing::run_cli(predict_args("hard"));
  auto b = bimhar::testing::run_cli(predict_args("hard"));
  auto c = bimhar::testing::run_cli(predict_args("off"));
  auto d = bimhar::testing::run_cli(predict_args("off"));
  Outcome o;
  o.pass = a.exit_code == 0 && c.exit_code == 0 && !a.out.empty() && a.out == b.out && c.out == d.out;
  o.detail = "hard " + std::to_string(a.out.size()) + " bytes x2 " + (a.out == b.out ? "identical" : "differ") +
             "; off " + std::to_string(c.out.size()) + " bytes x2 " + (c.out == d.out ? "identical" : "differ");
  return o;
}

}  // namespace

int main() {
  auto sweep = restriction_sweep();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"restriction monotonicity", [&] { return monotonicity(sweep); }},
      {"argmax preservation", [&] { return argmax_preservation(sweep); }},
      {"soft restriction limits", soft_limits},
      {"table 2 metric arithmetic", table2_arithmetic},
      {"label space fixtures", label_space_fixtures},
      {"infonce diagnostic", infonce_diagnostic},
      {"synthetic confidence lift", synthetic_lift},
      {"prediction determinism", determinism},
  };

  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
