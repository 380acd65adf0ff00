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
#include "wearauth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "wearauth/error.hpp"
#include "wearauth/rng.hpp"

namespace wearauth {

namespace {

double round_to(double v, double quantum) { return std::round(v / quantum) * quantum; }

void validate(const TransitionMatrix& t) {
  for (Eigen::Index r = 0; r < 4; ++r) {
    if ((t.row(r).array() < 0.0).any() || !t.row(r).allFinite())
      throw Error(Errc::InvalidTransitionMatrix,
                  "transition row " + std::to_string(r) + " has invalid entries");
    if (std::abs(t.row(r).sum() - 1.0) > 1e-9)
      throw Error(Errc::InvalidTransitionMatrix,
                  "transition row " + std::to_string(r) + " does not sum to 1");
  }
}

ActivityLevel next_level(const TransitionMatrix& t, ActivityLevel cur, Rng& rng) {
  const auto row = static_cast<Eigen::Index>(cur);
  const double u = rng.uniform();
  double acc = 0.0;
  for (Eigen::Index c = 0; c < 4; ++c) {
    acc += t(row, c);
    if (u < acc) return static_cast<ActivityLevel>(c);
  }
  // Rounding left u above the cumulative sum; take the last reachable level.
  for (Eigen::Index c = 3; c >= 0; --c)
    if (t(row, c) > 0.0) return static_cast<ActivityLevel>(c);
  return cur;
}

}  // namespace

TransitionMatrix default_transition_matrix() {
  TransitionMatrix t;
  t << 0.970, 0.022, 0.006, 0.002,
       0.080, 0.880, 0.030, 0.010,
       0.060, 0.070, 0.840, 0.030,
       0.050, 0.030, 0.070, 0.850;
  return t;
}

SubjectProfile draw_profile(std::string subject_id, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 1));
  SubjectProfile p;
  p.subject_id = std::move(subject_id);
  p.seed = seed;
  p.weight_kg = std::clamp(rng.normal(66.0, 11.0), 45.0, 110.0);
  p.age_years = std::clamp(rng.normal(18.0, 1.0), 16.0, 21.0);
  p.resting_hr = rng.uniform(52.0, 88.0);
  p.hr_gain = {0.0, std::max(5.0, rng.normal(15.0, 4.0)),
               std::max(15.0, rng.normal(35.0, 6.0)),
               std::max(30.0, rng.normal(60.0, 8.0))};
  p.step_rate = {rng.uniform(0.0, 3.0), std::max(20.0, rng.normal(50.0, 10.0)),
                 std::max(50.0, rng.normal(95.0, 12.0)),
                 std::max(80.0, rng.normal(130.0, 15.0))};
  p.noise.heart_rate = rng.uniform(1.5, 4.0);
  p.noise.calories = rng.uniform(0.05, 0.15);
  p.noise.steps = rng.uniform(0.1, 0.25);
  return p;
}

double calorie_model(const SubjectProfile& p, double heart_rate, double steps) {
  const double age_factor = 1.0 - 0.005 * (p.age_years - 18.0);
  const double hr_offset = std::max(0.0, heart_rate - p.resting_hr);
  return age_factor * p.weight_kg *
         (0.0175 + 0.0007 * hr_offset + 0.0003 * steps);
}

double met_model(const SubjectProfile& p, double calories) {
  return std::max(0.9, calories / (p.weight_kg * 0.0175));
}

std::vector<BiometricRecord> generate_subject(const SubjectProfile& p,
                                              std::int64_t minutes,
                                              const TransitionMatrix& transitions) {
  validate(transitions);
  if (minutes < 1) throw Error(Errc::InvalidArgument, "minutes must be >= 1");
  Rng rng(derive_seed(p.seed, 2));
  std::vector<BiometricRecord> out;
  out.reserve(static_cast<std::size_t>(minutes));

  const double phi = p.hr_autocorrelation;
  const double innovation = p.noise.heart_rate * std::sqrt(1.0 - phi * phi);
  double ar = rng.normal(0.0, p.noise.heart_rate);
  double day_offset = rng.normal(0.0, p.daily_hr_drift);
  auto level = ActivityLevel::Sedentary;

  for (std::int64_t t = 0; t < minutes; ++t) {
    if (t > 0) level = next_level(transitions, level, rng);
    if (t > 0 && t % 1440 == 0) day_offset = rng.normal(0.0, p.daily_hr_drift);
    ar = phi * ar + innovation * rng.normal();

    const auto li = static_cast<std::size_t>(level);
    const double hr = std::clamp(
        std::round(p.resting_hr + day_offset + p.hr_gain[li] + ar), 35.0, 220.0);
    const double rate =
        std::max(0.0, p.step_rate[li] * (1.0 + p.noise.steps * rng.normal()));
    const auto steps = static_cast<double>(rng.poisson(rate));
    const double kcal = round_to(
        std::max(0.0, calorie_model(p, hr, steps) + p.noise.calories * rng.normal()),
        1e-4);
    const double met = round_to(met_model(p, kcal), 1e-4);

    BiometricRecord r;
    r.subject_id = p.subject_id;
    r.minute = t;
    r.heart_rate = hr;
    r.calories = kcal;
    r.met = met;
    r.steps = steps;
    r.activity_level = level;
    out.push_back(std::move(r));
  }
  return out;
}

SyntheticDataset generate_dataset(std::size_t n_subjects, std::int64_t minutes,
                                  std::uint64_t master_seed,
                                  const TransitionMatrix& transitions) {
  if (n_subjects < 2) throw Error(Errc::InvalidArgument, "need at least 2 subjects");
  SyntheticDataset ds;
  const int width = std::max(3, static_cast<int>(std::to_string(n_subjects).size()));
  for (std::size_t i = 0; i < n_subjects; ++i) {
    std::string id = std::to_string(i + 1);
    id.insert(0, static_cast<std::size_t>(width) - std::min<std::size_t>(id.size(), width), '0');
    id.insert(0, 1, 'S');
    ds.profiles.push_back(draw_profile(id, derive_seed(master_seed, i)));
    auto recs = generate_subject(ds.profiles.back(), minutes, transitions);
    ds.records.insert(ds.records.end(), std::make_move_iterator(recs.begin()),
                      std::make_move_iterator(recs.end()));
  }
  return ds;
}

}  // namespace wearauth
