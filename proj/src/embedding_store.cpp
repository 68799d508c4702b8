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

#include "bimhar/embedding_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "bimhar/error.hpp"

namespace bimhar {

namespace {

constexpr double kZeroNorm = 1e-12;

double squared_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return sum;
}

std::vector<double> widen(const std::vector<float>& raw) {
  return std::vector<double>(raw.begin(), raw.end());
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

struct Header {
  std::size_t dim = 0;
  std::string kind;
};

Header parse_header(std::string_view line) {
  Header h;
  bool have_dim = false;
  for (auto token : split(line, ' ')) {
    if (token.empty()) continue;
    if (token.starts_with("dim=")) {
      auto digits = token.substr(4);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), h.dim);
      if (ec != std::errc{} || ptr != digits.data() + digits.size() || h.dim == 0) {
        throw ParseError("line 1: invalid dimension '" + std::string(digits) + "'");
      }
      have_dim = true;
    } else if (token.starts_with("kind=")) {
      h.kind = std::string(token.substr(5));
    } else {
      throw ParseError("line 1: unexpected header token '" + std::string(token) + "'");
    }
  }
  if (!have_dim) throw ParseError("line 1: header is missing dim=<D>");
  if (h.kind != "class" && h.kind != "clip" && h.kind != "pair") {
    throw ParseError("line 1: header kind must be 'class', 'clip' or 'pair'");
  }
  return h;
}

std::vector<float> parse_values(std::string_view field, std::size_t dim, std::size_t line_no,
                                std::string_view record_id) {
  std::vector<float> values;
  values.reserve(dim);
  auto where = [&] {
    return "line " + std::to_string(line_no) + " ('" + std::string(record_id) + "')";
  };
  for (auto token : split(field, ' ')) {
    if (token.empty()) throw ParseError(where() + ": empty value (values are single-space separated)");
    float v = 0.0f;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw ParseError(where() + ": invalid number '" + std::string(token) + "'");
    }
    if (!std::isfinite(v)) throw ParseError(where() + ": non-finite value '" + std::string(token) + "'");
    values.push_back(v);
  }
  if (values.size() != dim) {
    throw ParseError(where() + ": expected " + std::to_string(dim) + " values, found " +
                     std::to_string(values.size()));
  }
  return values;
}

template <typename Fn>
void for_each_record(std::string_view document, Fn&& fn) {
  std::size_t line_no = 1;
  std::size_t start = document.find('\n');
  if (start == std::string_view::npos) return;
  ++start;
  while (start < document.size()) {
    auto end = document.find('\n', start);
    auto line = document.substr(start, end == std::string_view::npos ? end : end - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) fn(line, line_no);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
}

std::string_view first_line(std::string_view document) {
  auto line = document.substr(0, document.find('\n'));
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

void append_values(std::string& out, std::span<const float> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_float(values[i]);
  }
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ValidationError("embedding has dimension 0");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValidationError("embedding component " + std::to_string(i) + " is not finite");
    }
  }
}

double EmbeddingVector::norm() const { return std::sqrt(squared_norm(values_)); }

EmbeddingVector normalize(const EmbeddingVector& v) {
  if (v.normalized()) return v;
  double n = v.norm();
  if (!(n >= kZeroNorm)) {
    throw DomainError("zero-norm embedding (norm " + std::to_string(n) + ")");
  }
  EmbeddingVector out = v;
  if (n != 1.0) {
    for (auto& x : out.values_) x /= n;
  }
  out.normalized_ = true;
  return out;
}

EmbeddingVector mean_pool(std::span<const EmbeddingVector> frames) {
  if (frames.empty()) throw DomainError("mean_pool needs at least one frame");
  const std::size_t dim = frames.front().dimension();
  for (const auto& f : frames) {
    if (f.dimension() != dim) {
      throw DomainError("mean_pool: frame dimension " + std::to_string(f.dimension()) +
                        " differs from " + std::to_string(dim));
    }
  }
  // Sorting each column before summing makes the result order-independent.
  std::vector<double> mean(dim);
  std::vector<double> column(frames.size());
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t k = 0; k < frames.size(); ++k) column[k] = frames[k].values()[d];
    std::sort(column.begin(), column.end());
    mean[d] = std::accumulate(column.begin(), column.end(), 0.0) /
              static_cast<double>(frames.size());
  }
  EmbeddingVector pooled(std::move(mean));
  if (pooled.norm() < kZeroNorm) throw DomainError("mean_pool: frames cancel to a zero-norm mean");
  return normalize(pooled);
}

ClassEmbeddingTable::ClassEmbeddingTable(std::vector<ClassEmbedding> entries)
    : entries_(std::move(entries)) {
  std::vector<std::string> issues;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (i == 0) dimension_ = e.unit.dimension();
    if (e.unit.dimension() != dimension_) {
      issues.push_back("class '" + e.label_id + "' has dimension " +
                       std::to_string(e.unit.dimension()) + ", expected " +
                       std::to_string(dimension_));
    }
    if (!e.unit.normalized()) issues.push_back("class '" + e.label_id + "' is not normalized");
    if (!index_.emplace(e.label_id, i).second) {
      issues.push_back("duplicate class id '" + e.label_id + "'");
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

const ClassEmbedding* ClassEmbeddingTable::find(std::string_view label_id) const {
  auto it = index_.find(std::string(label_id));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

ClassEmbedding make_class_embedding(std::string label_id, std::vector<float> raw) {
  EmbeddingVector unit;
  try {
    unit = normalize(EmbeddingVector(widen(raw)));
  } catch (const Error& e) {
    throw ValidationError("class '" + label_id + "': " + e.what());
  }
  return ClassEmbedding{std::move(label_id), std::move(raw), std::move(unit)};
}

ClipRecord make_clip(std::string clip_id, Timestamp timestamp,
                     std::optional<std::string> ground_truth, std::vector<float> raw) {
  EmbeddingVector unit;
  try {
    unit = normalize(EmbeddingVector(widen(raw)));
  } catch (const Error& e) {
    throw ValidationError("clip '" + clip_id + "': " + e.what());
  }
  return ClipRecord{std::move(clip_id), timestamp, std::move(ground_truth), std::move(raw),
                    std::move(unit)};
}

ClassEmbeddingTable read_embedding_table(std::string_view document) {
  auto header = parse_header(first_line(document));
  if (header.kind != "class") throw ParseError("line 1: expected kind=class, found kind=" + header.kind);

  std::vector<ClassEmbedding> entries;
  std::unordered_set<std::string> seen;
  for_each_record(document, [&](std::string_view line, std::size_t line_no) {
    auto fields = split(line, '\t');
    if (fields.size() != 2) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": class record needs 2 tab-separated fields, found " +
                       std::to_string(fields.size()));
    }
    std::string id(fields[0]);
    if (id.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty label id");
    if (!seen.insert(id).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate class id '" + id + "'");
    }
    entries.push_back(make_class_embedding(id, parse_values(fields[1], header.dim, line_no, id)));
  });
  return ClassEmbeddingTable(std::move(entries));
}

ClipSet read_clip_set(std::string_view document) {
  if (document.find_first_not_of(" \t\r\n") == std::string_view::npos) return ClipSet{};
  auto header = parse_header(first_line(document));
  if (header.kind != "clip") throw ParseError("line 1: expected kind=clip, found kind=" + header.kind);

  ClipSet set{header.dim, {}};
  std::unordered_set<std::string> seen;
  for_each_record(document, [&](std::string_view line, std::size_t line_no) {
    auto fields = split(line, '\t');
    if (fields.size() != 4) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": clip record needs 4 tab-separated fields, found " +
                       std::to_string(fields.size()));
    }
    std::string id(fields[0]);
    if (id.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty clip id");
    if (!seen.insert(id).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate clip id '" + id + "'");
    }
    Timestamp ts;
    try {
      ts = parse_timestamp(fields[1]);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + " ('" + id + "'): " + e.what());
    }
    std::optional<std::string> truth;
    if (fields[2].empty()) {
      throw ParseError("line " + std::to_string(line_no) + " ('" + id +
                       "'): empty ground-truth field (use '-' when absent)");
    }
    if (fields[2] != "-") truth = std::string(fields[2]);
    set.clips.push_back(
        make_clip(id, ts, std::move(truth), parse_values(fields[3], header.dim, line_no, id)));
  });
  return set;
}

std::vector<EmbeddingPairRecord> read_pair_set(std::string_view document) {
  auto header = parse_header(first_line(document));
  if (header.kind != "pair") throw ParseError("line 1: expected kind=pair, found kind=" + header.kind);
  std::vector<EmbeddingPairRecord> pairs;
  std::unordered_set<std::string> seen;
  for_each_record(document, [&](std::string_view line, std::size_t line_no) {
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": pair record needs 3 tab-separated fields, found " +
                       std::to_string(fields.size()));
    }
    std::string id(fields[0]);
    if (!seen.insert(id).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate pair id '" + id + "'");
    }
    auto unit = [&](std::string_view field) {
      try {
        return normalize(EmbeddingVector(widen(parse_values(field, header.dim, line_no, id))));
      } catch (const DomainError& e) {
        throw ValidationError("pair '" + id + "': " + e.what());
      }
    };
    auto video = unit(fields[1]);
    auto text = unit(fields[2]);
    pairs.push_back(EmbeddingPairRecord{id, std::move(video), std::move(text)});
  });
  return pairs;
}

std::string format_float(float value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

std::string write_embedding_table(const ClassEmbeddingTable& table) {
  std::string out = "dim=" + std::to_string(table.dimension()) + " kind=class\n";
  for (const auto& e : table.entries()) {
    out += e.label_id;
    out += '\t';
    append_values(out, e.raw);
    out += '\n';
  }
  return out;
}

std::string write_clip_set(const ClipSet& set) {
  std::string out = "dim=" + std::to_string(set.dimension) + " kind=clip\n";
  for (const auto& c : set.clips) {
    out += c.clip_id;
    out += '\t';
    out += format_timestamp(c.timestamp);
    out += '\t';
    out += c.ground_truth.value_or("-");
    out += '\t';
    append_values(out, c.raw);
    out += '\n';
  }
  return out;
}

}  // namespace bimhar
