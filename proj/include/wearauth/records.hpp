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
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "wearauth/error.hpp"

namespace wearauth {

enum class ActivityLevel { Sedentary = 0, Light = 1, Fair = 2, High = 3 };

enum class ActivityPeriod { Sedentary, NonSedentary };

/// Biometric channels in the fixed naming order C, S, M, H.
enum class Channel { Calories = 0, Steps = 1, Met = 2, HeartRate = 3 };

inline constexpr std::size_t kChannelCount = 4;
inline constexpr std::size_t kWindowLength = 5;

constexpr char channel_initial(Channel c) {
  constexpr std::array<char, kChannelCount> initials{'C', 'S', 'M', 'H'};
  return initials[static_cast<std::size_t>(c)];
}

constexpr ActivityPeriod period_of(ActivityLevel level) {
  return level == ActivityLevel::Sedentary ? ActivityPeriod::Sedentary
                                           : ActivityPeriod::NonSedentary;
}

std::string_view to_string(ActivityLevel level);
std::string_view to_string(ActivityPeriod period);
/// Case-insensitive; nullopt when the text names no level.
std::optional<ActivityLevel> parse_activity_level(std::string_view text);
/// Accepts "sedentary" and "non-sedentary" (also "nonsedentary").
std::optional<ActivityPeriod> parse_activity_period(std::string_view text);

/// One subject-minute. Absent measurements are nullopt.
struct BiometricRecord {
  std::string subject_id;
  std::int64_t minute = 0;
  std::optional<double> heart_rate;
  std::optional<double> calories;
  std::optional<double> met;
  std::optional<double> steps;
  std::optional<ActivityLevel> activity_level;

  bool complete() const {
    return heart_rate && calories && met && steps && activity_level;
  }
};

using WindowSamples = Eigen::Matrix<double, kWindowLength, kChannelCount>;

/// Five consecutive fully-populated minutes at one activity level.
/// Column order of samples follows Channel.
struct Window {
  std::string subject_id;
  std::int64_t start_minute = 0;
  ActivityLevel level = ActivityLevel::Sedentary;
  WindowSamples samples = WindowSamples::Zero();

  auto channel(Channel c) const {
    return samples.col(static_cast<Eigen::Index>(c));
  }
};

struct IngestOptions {
  /// Multiplier applied to the MET column (0.1 for x10 integer exports).
  double met_scale = 1.0;
};

/// Parses the minute-level CSV. The header must name subject_id, minute,
/// heart_rate, calories, met, steps and activity_level; other columns are
/// ignored. Empty cells and "NA" are null. Output is sorted by
/// (subject_id, minute).
std::vector<BiometricRecord> parse_records(std::istream& in,
                                           const IngestOptions& options = {});

void write_records(std::ostream& out,
                   const std::vector<BiometricRecord>& records);

struct AlignmentResult {
  std::vector<BiometricRecord> records;
  std::map<std::string, std::size_t> dropped;  // per subject
};

/// Keeps only minutes where every channel and the activity level are present.
AlignmentResult filter_aligned(const std::vector<BiometricRecord>& records);

/// Splits each maximal run of consecutive, same-level minutes into
/// back-to-back five-minute windows from the run start. A missing minute ends
/// a run. Only windows of the requested period are returned.
std::vector<Window> segment_windows(const std::vector<BiometricRecord>& records,
                                    ActivityPeriod period);

}  // namespace wearauth
