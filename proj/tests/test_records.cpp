// Copyright 2026 The wearauth Authors.
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
#include <set>
#include <sstream>

#include "doctest.h"
#include "wearauth/error.hpp"
#include "wearauth/records.hpp"

using namespace wearauth;

namespace {

const char* kHeader = "subject_id,minute,heart_rate,calories,met,steps,activity_level\n";

std::vector<BiometricRecord> parse(const std::string& body) {
  std::istringstream in(std::string(kHeader) + body);
  return parse_records(in);
}

BiometricRecord rec(const std::string& s, std::int64_t minute, ActivityLevel level) {
  BiometricRecord r;
  r.subject_id = s;
  r.minute = minute;
  r.heart_rate = 70.0 + static_cast<double>(minute % 7);
  r.calories = 1.2;
  r.met = 1.1;
  r.steps = 0.0;
  r.activity_level = level;
  return r;
}

// Builds a stream from a run-length description: (level, minutes) pairs,
// with a negative length meaning a gap of that many minutes.
std::vector<BiometricRecord> stream(
    const std::vector<std::pair<ActivityLevel, int>>& runs) {
  std::vector<BiometricRecord> out;
  std::int64_t t = 0;
  for (auto [level, len] : runs) {
    if (len < 0) {
      t += -len;
      continue;
    }
    for (int i = 0; i < len; ++i) out.push_back(rec("u", t++, level));
  }
  return out;
}

}  // namespace

TEST_CASE("parse_records accepts a single valid row") {
  const auto r = parse("a,10,72,1.5,1.2,0,sedentary\n");
  REQUIRE(r.size() == 1);
  CHECK(r[0].subject_id == "a");
  CHECK(r[0].minute == 10);
  CHECK(*r[0].heart_rate == 72.0);
  CHECK(*r[0].calories == 1.5);
  CHECK(*r[0].activity_level == ActivityLevel::Sedentary);
}

TEST_CASE("parse_records rejects negative steps with the line number") {
  try {
    parse("a,1,72,1.5,1.2,0,sedentary\na,2,72,1.5,1.2,-1,sedentary\n");
    FAIL("expected MalformedRow");
  } catch (const MalformedRow& e) {
    CHECK(e.line() == 3);
    CHECK(e.code() == Errc::MalformedRow);
  }
}

TEST_CASE("parse_records rejects out-of-range and non-numeric values") {
  CHECK_THROWS_AS(parse("a,1,0,1.5,1.2,0,sedentary\n"), MalformedRow);
  CHECK_THROWS_AS(parse("a,1,250,1.5,1.2,0,sedentary\n"), MalformedRow);
  CHECK_THROWS_AS(parse("a,1,72,-0.1,1.2,0,sedentary\n"), MalformedRow);
  CHECK_THROWS_AS(parse("a,1,72,1.5,abc,0,sedentary\n"), MalformedRow);
  CHECK_THROWS_AS(parse("a,x,72,1.5,1.2,0,sedentary\n"), MalformedRow);
  CHECK_THROWS_AS(parse("a,1,72,1.5,1.2,0,jogging\n"), MalformedRow);
  CHECK_THROWS_AS(parse("a,1,72,1.5\n"), MalformedRow);
}

TEST_CASE("parse_records rejects duplicate minutes") {
  try {
    parse("a,5,72,1.5,1.2,0,sedentary\nb,5,72,1.5,1.2,0,light\na,5,80,1.5,1.2,0,light\n");
    FAIL("expected DuplicateMinute");
  } catch (const DuplicateMinute& e) {
    CHECK(e.subject() == "a");
    CHECK(e.minute() == 5);
  }
}

TEST_CASE("parse_records rejects empty input") {
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_records(empty), Error);
  try {
    std::istringstream e2("");
    parse_records(e2);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyInput);
  }
}

TEST_CASE("parse_records handles nulls, extra columns, case and ordering") {
  std::istringstream in(
      "sleep,activity_level,steps,met,calories,heart_rate,minute,subject_id,label\n"
      "1,LIGHT,40,2.0,3.0,NA,2,b,x\n"
      "0,Sedentary,0,1.0,1.1,65,1,b,y\n"
      "0,fair,,1.0,1.1,90,7,a,z\n");
  const auto r = parse_records(in);
  REQUIRE(r.size() == 3);
  CHECK(r[0].subject_id == "a");
  CHECK_FALSE(r[0].steps.has_value());
  CHECK(*r[0].activity_level == ActivityLevel::Fair);
  CHECK(r[1].minute == 1);
  CHECK(r[2].minute == 2);
  CHECK_FALSE(r[2].heart_rate.has_value());
  CHECK(*r[2].activity_level == ActivityLevel::Light);
}

TEST_CASE("parse_records applies the MET scale") {
  std::istringstream in(std::string(kHeader) + "a,1,72,1.5,12,0,sedentary\n");
  const auto r = parse_records(in, {0.1});
  CHECK(*r[0].met == doctest::Approx(1.2).epsilon(1e-15));
}

TEST_CASE("write_records round-trips") {
  const auto original = parse(
      "a,1,72,1.2345678901234567,1.1,0,sedentary\n"
      "a,2,,0.1,1.1,3,high\n"
      "b,9,99,0.3,NA,2,fair\n");
  std::ostringstream out;
  write_records(out, original);
  std::istringstream in(out.str());
  const auto again = parse_records(in);
  REQUIRE(again.size() == original.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].subject_id == original[i].subject_id);
    CHECK(again[i].minute == original[i].minute);
    CHECK(again[i].heart_rate == original[i].heart_rate);
    CHECK(again[i].calories == original[i].calories);
    CHECK(again[i].met == original[i].met);
    CHECK(again[i].steps == original[i].steps);
    CHECK(again[i].activity_level == original[i].activity_level);
  }
}

TEST_CASE("filter_aligned keeps complete minutes and counts the rest") {
  auto all = stream({{ActivityLevel::Sedentary, 5}});
  CHECK(filter_aligned(all).records.size() == 5);

  auto r = stream({{ActivityLevel::Sedentary, 10}});
  r[2].calories.reset();
  r[5].calories.reset();
  r[9].calories.reset();
  const auto res = filter_aligned(r);
  CHECK(res.records.size() == 7);
  CHECK(res.dropped.at("u") == 3);

  auto h = stream({{ActivityLevel::Light, 3}});
  h[1].heart_rate.reset();
  const auto res2 = filter_aligned(h);
  CHECK(res2.records.size() == 2);
  CHECK(res2.records[1].minute == 2);
}

TEST_CASE("segment_windows splits runs back to back") {
  const auto r = stream({{ActivityLevel::Sedentary, 12}});
  const auto w = segment_windows(r, ActivityPeriod::Sedentary);
  REQUIRE(w.size() == 2);
  CHECK(w[0].start_minute == 0);
  CHECK(w[1].start_minute == 5);
  CHECK(w[0].samples(4, static_cast<int>(Channel::HeartRate)) == *r[4].heart_rate);
  CHECK(w[1].channel(Channel::Calories)(0) == *r[5].calories);

  CHECK(segment_windows(stream({{ActivityLevel::Light, 4}}),
                        ActivityPeriod::NonSedentary)
            .empty());

  const auto mixed = stream({{ActivityLevel::Sedentary, 5}, {ActivityLevel::Light, 5}});
  const auto ns = segment_windows(mixed, ActivityPeriod::NonSedentary);
  REQUIRE(ns.size() == 1);
  CHECK(ns[0].level == ActivityLevel::Light);
  CHECK(ns[0].start_minute == 5);
}

TEST_CASE("segment_windows breaks on gaps and level changes") {
  const auto r = stream({{ActivityLevel::Sedentary, 3},
                         {ActivityLevel::Sedentary, -1},
                         {ActivityLevel::Sedentary, 4},
                         {ActivityLevel::Light, 6},
                         {ActivityLevel::Fair, 5},
                         {ActivityLevel::Sedentary, 7}});
  CHECK(segment_windows(r, ActivityPeriod::Sedentary).size() == 1);
  const auto ns = segment_windows(r, ActivityPeriod::NonSedentary);
  REQUIRE(ns.size() == 2);
  CHECK(ns[0].level == ActivityLevel::Light);
  CHECK(ns[1].level == ActivityLevel::Fair);
}

TEST_CASE("segment_windows rejects incomplete records") {
  auto r = stream({{ActivityLevel::Sedentary, 5}});
  r[1].met.reset();
  CHECK_THROWS_AS(segment_windows(r, ActivityPeriod::Sedentary), Error);
}

TEST_CASE("windows are pure, disjoint and conserve minutes on random streams") {
  std::uint64_t state = 12345;
  const auto next = [&] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<int>(state >> 33);
  };
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<ActivityLevel, int>> runs;
    for (int k = 0; k < 30; ++k) {
      if (next() % 6 == 0) runs.push_back({ActivityLevel::Sedentary, -(1 + next() % 3)});
      else runs.push_back({static_cast<ActivityLevel>(next() % 4), 1 + next() % 17});
    }
    const auto r = stream(runs);
    // Brute-force run lengths: consecutive minutes with one level.
    std::size_t expected[2] = {0, 0};
    for (std::size_t i = 0; i < r.size();) {
      std::size_t j = i + 1;
      while (j < r.size() && r[j].minute == r[j - 1].minute + 1 &&
             r[j].activity_level == r[i].activity_level)
        ++j;
      expected[*r[i].activity_level == ActivityLevel::Sedentary ? 0 : 1] += (j - i) / 5;
      i = j;
    }
    for (auto period : {ActivityPeriod::Sedentary, ActivityPeriod::NonSedentary}) {
      const auto w = segment_windows(r, period);
      CHECK(w.size() == expected[period == ActivityPeriod::Sedentary ? 0 : 1]);
      std::set<std::int64_t> used;
      for (const auto& win : w) {
        CHECK(period_of(win.level) == period);
        for (int k = 0; k < 5; ++k) {
          CHECK(used.insert(win.start_minute + k).second);
          const auto it = std::find_if(r.begin(), r.end(), [&](const auto& x) {
            return x.minute == win.start_minute + k;
          });
          REQUIRE(it != r.end());
          CHECK(*it->activity_level == win.level);
        }
      }
    }
  }
}
