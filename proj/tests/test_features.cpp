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
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wearauth/features.hpp"

using namespace wearauth;

namespace {

Eigen::Matrix<double, 5, 1> vec(std::initializer_list<double> v) {
  Eigen::Matrix<double, 5, 1> out;
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double feat(const Eigen::Matrix<double, 27, 1>& f, std::string_view name) {
  for (std::size_t i = 0; i < kFeatureAbbrev.size(); ++i)
    if (kFeatureAbbrev[i] == name) return f(static_cast<Eigen::Index>(i));
  FAIL("unknown feature " << name);
  return 0.0;
}

}  // namespace

TEST_CASE("constant window") {
  const auto f = channel_features(vec({60, 60, 60, 60, 60}));
  CHECK(feat(f, "mu") == 60.0);
  CHECK(feat(f, "sigma") == 0.0);
  CHECK(feat(f, "sigma2") == 0.0);
  CHECK(feat(f, "cov") == 0.0);
  CHECK(feat(f, "max") == 60.0);
  CHECK(feat(f, "min") == 60.0);
  CHECK(feat(f, "ran") == 0.0);
  CHECK(feat(f, "coran") == 0.0);
  CHECK(feat(f, "iqr") == 0.0);
  CHECK(feat(f, "np") == 0.0);
  CHECK(feat(f, "rms") == 60.0);
  CHECK(feat(f, "E") == 18000.0);
  CHECK(feat(f, "f_mu") == 0.0);
  CHECK(feat(f, "f_Mdn") == 0.0);
}

TEST_CASE("ramp window") {
  const auto f = channel_features(vec({1, 2, 3, 4, 5}));
  CHECK(feat(f, "mu") == doctest::Approx(3.0));
  CHECK(feat(f, "sigma") == doctest::Approx(1.5811388300841898));
  CHECK(feat(f, "ran") == 4.0);
  CHECK(feat(f, "coran") == doctest::Approx(4.0 / 6.0));
  CHECK(feat(f, "p50") == 3.0);
  CHECK(feat(f, "mad_mu") == doctest::Approx(1.2));
  CHECK(feat(f, "rss") == doctest::Approx(std::sqrt(55.0)));
  CHECK(feat(f, "p25") == 2.0);
  CHECK(feat(f, "p95") == doctest::Approx(4.8));
}

TEST_CASE("zero window guards") {
  const auto f = channel_features(vec({0, 0, 0, 0, 0}));
  CHECK(feat(f, "cov") == 0.0);
  CHECK(feat(f, "coran") == 0.0);
  CHECK(feat(f, "p2rms") == 0.0);
  CHECK(feat(f, "snr") == 0.0);
  CHECK(feat(f, "gamma") == 0.0);
  CHECK(feat(f, "kappa") == 0.0);
  for (int i = 0; i < 27; ++i) CHECK(std::isfinite(f(i)));
}

TEST_CASE("periodogram") {
  for (const auto& [fq, p] : periodogram(vec({7, 7, 7, 7, 7}))) {
    (void)fq;
    CHECK(p == doctest::Approx(0.0));
  }
  const auto alt = periodogram(vec({1, -1, 1, -1, 1}));
  REQUIRE(alt.size() == 2);
  CHECK(alt[0].first == doctest::Approx(0.2));
  CHECK(alt[1].first == doctest::Approx(0.4));
  CHECK(alt[1].second > alt[0].second);

  Eigen::Matrix<double, 5, 1> sine;
  for (int t = 0; t < 5; ++t) sine(t) = std::sin(2.0 * M_PI * t / 5.0);
  const auto s = periodogram(sine);
  CHECK(s[0].second == doctest::Approx(1.25));
  CHECK(s[1].second == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("count_peaks") {
  CHECK(count_peaks(vec({1, 3, 1, 3, 1})) == 2);
  CHECK(count_peaks(vec({1, 2, 3, 4, 5})) == 0);
  CHECK(count_peaks(vec({1, 2, 2, 1, 0})) == 0);
}

TEST_CASE("channel_features agrees with the brute-force oracle") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-50.0, 150.0);
  std::uniform_int_distribution<int> small(0, 3);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> x(5);
    for (auto& v : x) v = trial % 4 == 0 ? small(gen) : u(gen);  // ties included
    Eigen::Map<const Eigen::Matrix<double, 5, 1>> m(x.data());
    const auto got = channel_features(m);
    const auto want = oracle::features(x);
    for (int i = 0; i < 27; ++i) {
      INFO("feature " << kFeatureAbbrev[static_cast<std::size_t>(i)] << " trial " << trial);
      CHECK(oracle::close(got(i), want[static_cast<std::size_t>(i)], 1e-9));
    }
  }
}

TEST_CASE("shift and scale properties") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(1.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Matrix<double, 5, 1> x;
    for (int i = 0; i < 5; ++i) x(i) = u(gen);
    const double c = u(gen);
    const auto f = channel_features(x);
    const auto shifted = channel_features((x.array() + c).matrix().eval());
    const auto scaled = channel_features((x * c).eval());
    for (auto n : {"mu", "max", "min", "p25", "p50", "p75", "p95"})
      CHECK(feat(shifted, n) == doctest::Approx(feat(f, n) + c));
    for (auto n : {"sigma", "sigma2", "ran", "iqr", "mad_mu", "mad_Mdn", "np", "f_mu", "f_Mdn"})
      CHECK(feat(shifted, n) == doctest::Approx(feat(f, n)).epsilon(1e-7));
    for (auto n : {"sigma", "ran", "iqr", "rms", "rss"})
      CHECK(feat(scaled, n) == doctest::Approx(c * feat(f, n)));
    for (auto n : {"cov", "coran", "coi", "p2rms", "snr", "gamma"})
      CHECK(feat(scaled, n) == doctest::Approx(feat(f, n)));
    CHECK(feat(f, "min") <= feat(f, "p25"));
    CHECK(feat(f, "p25") <= feat(f, "p50"));
    CHECK(feat(f, "p50") <= feat(f, "p75"));
    CHECK(feat(f, "p75") <= feat(f, "p95"));
    CHECK(feat(f, "p95") <= feat(f, "max"));
    CHECK(feat(f, "E") == doctest::Approx(5.0 * feat(f, "P")));
    CHECK(feat(f, "E") == doctest::Approx(feat(f, "rss") * feat(f, "rss")));
    CHECK(feat(f, "P") == doctest::Approx(feat(f, "rms") * feat(f, "rms")));
  }
}

TEST_CASE("channel_features works on expressions and float") {
  Eigen::Matrix<double, 5, 2> m;
  m << 1, 9, 2, 8, 3, 7, 4, 6, 5, 5;
  const auto f = channel_features(m.col(0));
  CHECK(feat(f, "mu") == doctest::Approx(3.0));
  const Eigen::Matrix<float, 5, 1> xf = m.col(1).cast<float>();
  const auto ff = channel_features(xf);
  CHECK(ff(0) == doctest::Approx(7.0f));
}

TEST_CASE("BiometricCombo") {
  CHECK(BiometricCombo::parse("MC").name() == "CM");
  CHECK(BiometricCombo::parse("hsmc").name() == "CSMH");
  CHECK(BiometricCombo::all().name() == "CSMH");
  CHECK_THROWS_AS(BiometricCombo::parse(""), Error);
  CHECK_THROWS_AS(BiometricCombo::parse("CX"), Error);
  CHECK_THROWS_AS(BiometricCombo::parse("CC"), Error);
  const auto c = BiometricCombo::parse("SH");
  CHECK(c.contains(Channel::Steps));
  CHECK_FALSE(c.contains(Channel::Met));
}

TEST_CASE("feature_names") {
  const auto n = feature_names(BiometricCombo::parse("HC"), true);
  REQUIRE(n.size() == 55);
  CHECK(n.front() == "C_mu");
  CHECK(n[27] == "H_mu");
  CHECK(n[26] == "C_kappa");
  CHECK(n.back() == "activity_level");
  CHECK(feature_names(BiometricCombo::all(), false).size() == 108);
  const auto one = feature_names(BiometricCombo::parse("C"), false);
  CHECK(one[15] == "C_mad_Mdn");
}

TEST_CASE("extract_features and build_feature_matrix") {
  Window w;
  w.subject_id = "s";
  w.start_minute = 40;
  w.level = ActivityLevel::Fair;
  for (int t = 0; t < 5; ++t)
    for (int c = 0; c < 4; ++c) w.samples(t, c) = 10.0 * c + t;
  const auto fv = extract_features(w, BiometricCombo::parse("SH"), true);
  REQUIRE(fv.values.size() == 55);
  CHECK(fv.names[0] == "S_mu");
  CHECK(fv.values(0) == doctest::Approx(12.0));
  CHECK(fv.values(27) == doctest::Approx(32.0));
  CHECK(fv.values(54) == 2.0);
  CHECK(fv.window.start_minute == 40);

  Window w2 = w;
  w2.samples(2, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    extract_features(w2, BiometricCombo::parse("S"), false);
    FAIL("expected DegenerateWindow");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateWindow);
  }
  // The whole window must be finite, whichever channels are extracted.
  CHECK_THROWS_AS(extract_features(w2, BiometricCombo::parse("C"), false), Error);

  const auto fm = build_feature_matrix({w, w}, BiometricCombo::parse("C"), false);
  CHECK(fm.values.rows() == 2);
  CHECK(fm.values.cols() == 27);
  CHECK(fm.column("C_p95") == 11);
  CHECK_THROWS(fm.column("H_mu"));
  CHECK(fm.subject_labels() == std::vector<std::string>{"s", "s"});
}
