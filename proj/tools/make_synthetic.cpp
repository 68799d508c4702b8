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

// Generates the synthetic embedding fixtures used by the end-to-end
// confidence-lift check: near-orthogonal class embeddings for every registry
// label and clips scheduled inside task windows. A share of the clips is
// pulled towards an off-task class strongly enough that the unrestricted
// argmax lands outside the scheduled task.
//
//   bimhar_synth --registry R --schedule S --out-dir DIR [--dim 32]
//                [--clips-per-task 30] [--confuser-share 0.4] [--seed 2023]

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bimhar/embedding_store.hpp"
#include "bimhar/error.hpp"
#include "bimhar/label_registry.hpp"
#include "bimhar/schedule.hpp"
#include "bimhar/scoring.hpp"

namespace {

using namespace bimhar;

// Portable across standard libraries, unlike std::normal_distribution.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void scale_to_unit(Vec& v) {
  double n = std::sqrt(dot(v, v));
  for (auto& x : v) x /= n;
}

std::vector<float> to_float(const Vec& v) { return std::vector<float>(v.begin(), v.end()); }

struct ClassGeometry {
  std::vector<Vec> classes;  // near-orthogonal unit vectors
  std::vector<Vec> span;     // orthonormal basis of span(classes)
};

std::vector<Vec> orthonormalize(const std::vector<Vec>& vs) {
  std::vector<Vec> out;
  for (Vec v : vs) {
    for (const auto& b : out) {
      double d = dot(v, b);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= d * b[i];
    }
    scale_to_unit(v);
    out.push_back(std::move(v));
  }
  return out;
}

// Gram-Schmidt on Gaussian draws, then a small perturbation.
ClassGeometry class_vectors(std::size_t count, std::size_t dim, Gaussian& rng) {
  std::vector<Vec> draws(count, Vec(dim));
  for (auto& v : draws) {
    for (auto& x : v) x = rng();
  }
  ClassGeometry g;
  g.classes = orthonormalize(draws);
  for (auto& v : g.classes) {
    for (auto& x : v) x += 0.02 * rng();
    scale_to_unit(v);
  }
  g.span = orthonormalize(g.classes);
  return g;
}

// Random direction orthogonal to every class vector, scaled to `norm`. Adds
// the scene content shared by all prompts, which compresses similarity gaps
// the way real video-text embeddings do.
Vec nuisance(const std::vector<Vec>& basis, std::size_t dim, double norm, Gaussian& rng) {
  Vec v(dim);
  for (auto& x : v) x = rng();
  for (const auto& b : basis) {
    double d = dot(v, b);
    for (std::size_t i = 0; i < dim; ++i) v[i] -= d * b[i];
  }
  scale_to_unit(v);
  for (auto& x : v) x *= norm;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate synthetic embedding fixtures"};
  std::string registry_path, schedule_path, out_dir;
  std::size_t dim = 32, per_task = 30;
  double confuser_share = 0.4;
  std::uint64_t seed = 2023;
  app.add_option("--registry", registry_path)->required();
  app.add_option("--schedule", schedule_path)->required();
  app.add_option("--out-dir", out_dir)->required();
  app.add_option("--dim", dim);
  app.add_option("--clips-per-task", per_task);
  app.add_option("--confuser-share", confuser_share);
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);

  try {
    auto registry = load_registry(read_file(registry_path));
    auto schedule = parse_schedule(read_file(schedule_path));
    Gaussian rng(seed);

    const auto labels = registry.label_ids();
    if (labels.size() >= dim) throw DomainError("--dim must exceed the number of labels");
    auto geometry = class_vectors(labels.size(), dim, rng);
    const auto& vectors = geometry.classes;
    std::vector<ClassEmbedding> classes;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      classes.push_back(make_class_embedding(labels[i], to_float(vectors[i])));
    }
    ClassEmbeddingTable table(std::move(classes));

    ClipSet clips{dim, {}};
    std::size_t serial = 0;
    for (const auto& entry : schedule.entries()) {
      auto space = registry.label_space_for_task(entry.task_id);
      std::vector<std::size_t> off_task;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!space.contains(i)) off_task.push_back(i);
      }
      const auto window = entry.end - entry.start;
      for (std::size_t k = 0; k < per_task; ++k) {
        auto truth = space.indices()[rng.index(space.size())];
        auto distractor = off_task[rng.index(off_task.size())];
        // k-th clip is a confuser when the running share falls behind the target
        bool confuser = static_cast<double>(k + 1) * confuser_share -
                            std::floor(static_cast<double>(k) * confuser_share) >= 1.0;
        double pull = confuser ? 0.64 + 0.06 * rng.uniform() : 0.3 + 0.15 * rng.uniform();
        Vec v = nuisance(geometry.span, dim, 2.5 + 0.5 * rng.uniform(), rng);
        for (std::size_t d = 0; d < dim; ++d) {
          v[d] += 0.6 * vectors[truth][d] + pull * vectors[distractor][d] + 0.03 * rng();
        }
        auto offset = window * static_cast<std::int64_t>(2 * k + 1) / static_cast<std::int64_t>(2 * per_task);
        char id[32];
        std::snprintf(id, sizeof id, "syn-%03zu", ++serial);
        clips.clips.push_back(make_clip(id, entry.start + offset, labels[truth], to_float(v)));
      }
    }

    // Report how often the unrestricted argmax leaves the scheduled task.
    std::size_t outside = 0;
    for (const auto& clip : clips.clips) {
      auto p = predict(clip, table, schedule, registry, ScoringConfig{});
      auto resolved = resolve_label_space(schedule, registry, clip.timestamp);
      if (!resolved.contains(std::string_view(p.predicted_label))) ++outside;
    }

    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / "classes.emb", std::ios::binary)
        << write_embedding_table(table);
    std::ofstream(std::filesystem::path(out_dir) / "clips.emb", std::ios::binary) << write_clip_set(clips);
    std::cout << clips.clips.size() << " clips, " << outside << " with an off-task unrestricted argmax ("
              << 100.0 * static_cast<double>(outside) / static_cast<double>(clips.clips.size())
              << "%)\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  return 0;
}
