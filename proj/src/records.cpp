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
#include "wearauth/records.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <tuple>

#include "wearauth/error.hpp"

namespace wearauth {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool is_null(std::string_view cell) { return cell.empty() || cell == "NA"; }

std::optional<double> parse_number(std::string_view cell, std::size_t line,
                                   const char* column) {
  if (is_null(cell)) return std::nullopt;
  double value = 0.0;
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw MalformedRow(line, std::string(column) + " is not a finite number: '" +
                                 std::string(cell) + "'");
  }
  return value;
}

constexpr std::array<const char*, 7> kColumns{
    "subject_id", "minute", "heart_rate", "calories",
    "met",        "steps",  "activity_level"};

}  // namespace

std::string_view to_string(ActivityLevel level) {
  switch (level) {
    case ActivityLevel::Sedentary: return "sedentary";
    case ActivityLevel::Light: return "light";
    case ActivityLevel::Fair: return "fair";
    case ActivityLevel::High: return "high";
  }
  return "sedentary";
}

std::string_view to_string(ActivityPeriod period) {
  return period == ActivityPeriod::Sedentary ? "sedentary" : "non-sedentary";
}

std::optional<ActivityLevel> parse_activity_level(std::string_view text) {
  const auto s = lower(trim(text));
  if (s == "sedentary") return ActivityLevel::Sedentary;
  if (s == "light") return ActivityLevel::Light;
  if (s == "fair") return ActivityLevel::Fair;
  if (s == "high") return ActivityLevel::High;
  return std::nullopt;
}

std::optional<ActivityPeriod> parse_activity_period(std::string_view text) {
  const auto s = lower(trim(text));
  if (s == "sedentary") return ActivityPeriod::Sedentary;
  if (s == "non-sedentary" || s == "nonsedentary" || s == "non_sedentary")
    return ActivityPeriod::NonSedentary;
  return std::nullopt;
}

std::vector<BiometricRecord> parse_records(std::istream& in,
                                           const IngestOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::array<std::size_t, kColumns.size()> index{};
  std::size_t min_fields = 0;
  std::vector<BiometricRecord> records;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      for (std::size_t c = 0; c < kColumns.size(); ++c) {
        const auto it = std::find_if(fields.begin(), fields.end(),
                                     [&](std::string_view f) {
                                       return lower(f) == kColumns[c];
                                     });
        if (it == fields.end()) {
          throw MalformedRow(line_no, std::string("header lacks column '") +
                                          kColumns[c] + "'");
        }
        index[c] = static_cast<std::size_t>(it - fields.begin());
        min_fields = std::max(min_fields, index[c] + 1);
      }
      have_header = true;
      continue;
    }
    if (fields.size() < min_fields) {
      throw MalformedRow(line_no, "expected at least " +
                                      std::to_string(min_fields) +
                                      " fields, got " +
                                      std::to_string(fields.size()));
    }

    BiometricRecord r;
    r.subject_id = std::string(fields[index[0]]);
    if (r.subject_id.empty()) throw MalformedRow(line_no, "empty subject_id");

    const auto minute_cell = fields[index[1]];
    const auto* end = minute_cell.data() + minute_cell.size();
    auto [ptr, ec] = std::from_chars(minute_cell.data(), end, r.minute);
    if (minute_cell.empty() || ec != std::errc{} || ptr != end) {
      throw MalformedRow(line_no, "minute is not an integer: '" +
                                      std::string(minute_cell) + "'");
    }

    r.heart_rate = parse_number(fields[index[2]], line_no, "heart_rate");
    r.calories = parse_number(fields[index[3]], line_no, "calories");
    r.met = parse_number(fields[index[4]], line_no, "met");
    r.steps = parse_number(fields[index[5]], line_no, "steps");
    if (r.met) *r.met *= options.met_scale;

    if (r.heart_rate && !(*r.heart_rate > 0.0 && *r.heart_rate < 250.0))
      throw MalformedRow(line_no, "heart_rate outside (0, 250)");
    if (r.calories && *r.calories < 0.0)
      throw MalformedRow(line_no, "calories < 0");
    if (r.met && *r.met < 0.0) throw MalformedRow(line_no, "met < 0");
    if (r.steps && *r.steps < 0.0) throw MalformedRow(line_no, "steps < 0");

    const auto level_cell = fields[index[6]];
    if (!is_null(level_cell)) {
      r.activity_level = parse_activity_level(level_cell);
      if (!r.activity_level) {
        throw MalformedRow(line_no, "unknown activity_level '" +
                                        std::string(level_cell) + "'");
      }
    }
    records.push_back(std::move(r));
  }

  if (!have_header) throw Error(Errc::EmptyInput, "input has no header");
  if (records.empty()) throw Error(Errc::EmptyInput, "input has no data rows");

  std::stable_sort(records.begin(), records.end(),
                   [](const BiometricRecord& a, const BiometricRecord& b) {
                     return std::tie(a.subject_id, a.minute) <
                            std::tie(b.subject_id, b.minute);
                   });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].subject_id == records[i - 1].subject_id &&
        records[i].minute == records[i - 1].minute) {
      throw DuplicateMinute(records[i].subject_id, records[i].minute);
    }
  }
  return records;
}

void write_records(std::ostream& out,
                   const std::vector<BiometricRecord>& records) {
  const auto cell = [&out](const std::optional<double>& v) {
    if (!v) return;
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *v);
    out.write(buf, ptr - buf);
  };
  out << "subject_id,minute,heart_rate,calories,met,steps,activity_level\n";
  for (const auto& r : records) {
    out << r.subject_id << ',' << r.minute << ',';
    cell(r.heart_rate);
    out << ',';
    cell(r.calories);
    out << ',';
    cell(r.met);
    out << ',';
    cell(r.steps);
    out << ',';
    if (r.activity_level) out << to_string(*r.activity_level);
    out << '\n';
  }
}

AlignmentResult filter_aligned(const std::vector<BiometricRecord>& records) {
  AlignmentResult result;
  for (const auto& r : records) {
    if (r.complete()) {
      result.records.push_back(r);
    } else {
      ++result.dropped[r.subject_id];
    }
  }
  return result;
}

std::vector<Window> segment_windows(const std::vector<BiometricRecord>& records,
                                    ActivityPeriod period) {
  std::vector<Window> windows;
  std::size_t run_start = 0;
  const auto flush = [&](std::size_t begin, std::size_t end) {
    const auto level = *records[begin].activity_level;
    if (period_of(level) != period) return;
    for (std::size_t w = begin; w + kWindowLength <= end; w += kWindowLength) {
      Window win;
      win.subject_id = records[w].subject_id;
      win.start_minute = records[w].minute;
      win.level = level;
      for (std::size_t k = 0; k < kWindowLength; ++k) {
        const auto& r = records[w + k];
        const auto row = static_cast<Eigen::Index>(k);
        win.samples(row, 0) = *r.calories;
        win.samples(row, 1) = *r.steps;
        win.samples(row, 2) = *r.met;
        win.samples(row, 3) = *r.heart_rate;
      }
      windows.push_back(std::move(win));
    }
  };

  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].complete()) {
      throw Error(Errc::InvalidArgument,
                  "segment_windows requires aligned records");
    }
    if (i == run_start) continue;
    const auto& prev = records[i - 1];
    const auto& cur = records[i];
    const bool continues = cur.subject_id == prev.subject_id &&
                           cur.minute == prev.minute + 1 &&
                           cur.activity_level == prev.activity_level;
    if (!continues) {
      flush(run_start, i);
      run_start = i;
    }
  }
  if (run_start < records.size()) flush(run_start, records.size());
  return windows;
}

}  // namespace wearauth
