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

#include "bimhar/timestamp.hpp"

#include <charconv>
#include <cstdio>

#include "bimhar/error.hpp"

namespace bimhar {

namespace {

class Cursor {
 public:
  Cursor(std::string_view text) : text_(text) {}

  int digits(int count, const char* field) {
    if (pos_ + count > text_.size()) fail(std::string("truncated ") + field);
    int value = 0;
    for (int i = 0; i < count; ++i) {
      char c = text_[pos_ + i];
      if (c < '0' || c > '9') fail(std::string("expected digits for ") + field);
      value = value * 10 + (c - '0');
    }
    pos_ += count;
    return value;
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  bool peek(char c) const { return pos_ < text_.size() && text_[pos_] == c; }
  bool done() const { return pos_ == text_.size(); }
  char next() {
    if (done()) fail("unexpected end");
    return text_[pos_++];
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("invalid timestamp '" + std::string(text_) + "': " + why);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  Cursor cur(text);
  int y = cur.digits(4, "year");
  cur.expect('-');
  int mo = cur.digits(2, "month");
  cur.expect('-');
  int d = cur.digits(2, "day");
  cur.expect('T');
  int hh = cur.digits(2, "hour");
  cur.expect(':');
  int mm = cur.digits(2, "minute");
  cur.expect(':');
  int ss = cur.digits(2, "second");

  long long micros = 0;
  if (cur.peek('.')) {
    cur.next();
    int n = 0;
    while (!cur.done() && !cur.peek('Z') && !cur.peek('+') && !cur.peek('-')) {
      char c = cur.next();
      if (c < '0' || c > '9' || n == 6) cur.fail("fractional seconds must be 1-6 digits");
      micros = micros * 10 + (c - '0');
      ++n;
    }
    if (n == 0) cur.fail("empty fractional seconds");
    for (; n < 6; ++n) micros *= 10;
  }

  int offset_minutes = 0;
  if (cur.peek('Z')) {
    cur.next();
  } else if (cur.peek('+') || cur.peek('-')) {
    int sign = cur.next() == '+' ? 1 : -1;
    int oh = cur.digits(2, "offset hours");
    cur.expect(':');
    int om = cur.digits(2, "offset minutes");
    if (oh > 23 || om > 59) cur.fail("offset out of range");
    offset_minutes = sign * (oh * 60 + om);
  } else {
    cur.fail("missing UTC offset");
  }
  if (!cur.done()) cur.fail("trailing characters");

  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) cur.fail("no such calendar date");
  if (hh > 23 || mm > 59 || ss > 59) cur.fail("time of day out of range");

  auto local = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} + microseconds{micros};
  return local - minutes{offset_minutes};
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  auto day_start = floor<days>(t);
  year_month_day ymd{day_start};
  hh_mm_ss<microseconds> tod{t - day_start};

  char buf[40];
  int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02lld",
                        static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                        static_cast<unsigned>(ymd.day()), static_cast<int>(tod.hours().count()),
                        static_cast<int>(tod.minutes().count()),
                        static_cast<long long>(tod.seconds().count()));
  std::string out(buf, static_cast<std::size_t>(n));
  if (auto frac = tod.subseconds().count(); frac != 0) {
    std::snprintf(buf, sizeof buf, ".%06lld", static_cast<long long>(frac));
    out += buf;
  }
  out += 'Z';
  return out;
}

}  // namespace bimhar
