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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wearauth/records.hpp"

namespace wearauth {

/// Row-stochastic activity-level transition matrix, indexed by ActivityLevel.
using TransitionMatrix = Eigen::Matrix4d;

/// Sedentary-heavy chain with long runs; roughly 70% of minutes sedentary.
TransitionMatrix default_transition_matrix();

struct NoiseScales {
  double heart_rate = 2.5;  // bpm, stationary SD of the AR(1) term
  double calories = 0.08;   // kcal/min
  double steps = 0.15;      // relative jitter of the per-minute step rate
};

struct SubjectProfile {
  std::string subject_id;
  double weight_kg = 65.0;
  double age_years = 18.0;
  double resting_hr = 65.0;
  std::array<double, 4> hr_gain{0.0, 15.0, 35.0, 60.0};   // per level
  std::array<double, 4> step_rate{1.0, 50.0, 95.0, 130.0};  // steps/min
  double hr_autocorrelation = 0.8;
  double daily_hr_drift = 2.0;  // SD of a per-day resting HR offset
  NoiseScales noise;
  std::uint64_t seed = 0;
};

/// Draws a profile from the generator's priors: weight ~ N(66, 11) in
/// [45, 110] kg, age ~ N(18, 1), resting HR ~ U(52, 88), per-level HR gains
/// and step rates jittered around the defaults.
SubjectProfile draw_profile(std::string subject_id, std::uint64_t seed);

/// Deterministic part of the calorie model (kcal/min).
double calorie_model(const SubjectProfile& profile, double heart_rate, double steps);

/// MET implied by a calorie burn, floored at 0.9.
double met_model(const SubjectProfile& profile, double calories);

/// Minute-level stream for one subject starting at minute 0. Heart rate and
/// steps are integers; calories and MET are rounded to 4 decimals.
/// Throws InvalidTransitionMatrix.
std::vector<BiometricRecord> generate_subject(const SubjectProfile& profile,
                                              std::int64_t minutes,
                                              const TransitionMatrix& transitions);

struct SyntheticDataset {
  std::vector<SubjectProfile> profiles;
  std::vector<BiometricRecord> records;  // sorted by (subject, minute)
};

SyntheticDataset generate_dataset(
    std::size_t n_subjects, std::int64_t minutes, std::uint64_t master_seed,
    const TransitionMatrix& transitions = default_transition_matrix());

}  // namespace wearauth
