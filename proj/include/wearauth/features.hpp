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

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "wearauth/records.hpp"

namespace wearauth {

inline constexpr std::size_t kFeaturesPerChannel = 27;

/// Per-channel feature abbreviations, in output order.
inline constexpr std::array<std::string_view, kFeaturesPerChannel>
    kFeatureAbbrev{"mu",    "sigma",   "sigma2", "cov",  "max",   "min",
                   "ran",   "coran",   "p25",    "p50",  "p75",   "p95",
                   "iqr",   "coi",     "mad_mu", "mad_Mdn", "f_mu", "f_Mdn",
                   "P",     "np",      "E",      "rms",  "p2rms", "rss",
                   "snr",   "gamma",   "kappa"};

inline constexpr std::string_view kActivityFeature = "activity_level";

/// Non-empty subset of the four channels. Names list initials in C, S, M, H
/// order, e.g. "CM" or "CSMH".
class BiometricCombo {
 public:
  BiometricCombo() = default;
  explicit BiometricCombo(std::array<bool, kChannelCount> channels);

  /// Accepts initials in any order; throws InvalidArgument on unknown or
  /// repeated letters and on an empty string.
  static BiometricCombo parse(std::string_view text);
  static BiometricCombo all() { return BiometricCombo({true, true, true, true}); }

  bool contains(Channel c) const {
    return channels_[static_cast<std::size_t>(c)];
  }
  std::vector<Channel> channels() const;
  std::string name() const;

  friend bool operator==(const BiometricCombo&, const BiometricCombo&) = default;

 private:
  std::array<bool, kChannelCount> channels_{};
};

/// Canonical feature names: 27 per channel in C, S, M, H order, then the
/// ordinal activity feature when requested.
std::vector<std::string> feature_names(const BiometricCombo& combo,
                                       bool include_activity);

/// Percentile by linear interpolation between closest ranks (inclusive).
/// \p sorted must be ascending and non-empty.
template <typename T>
T percentile_sorted(const std::vector<T>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const T frac = static_cast<T>(h - static_cast<double>(lo));
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// One-sided periodogram of the mean-removed signal at 1 sample/min.
/// Bins k = 1 .. floor(n/2) at k/n cycles/min; power |DFT_k|^2 / n.
template <typename Derived>
std::vector<std::pair<typename Derived::Scalar, typename Derived::Scalar>>
periodogram(const Eigen::MatrixBase<Derived>& x) {
  using T = typename Derived::Scalar;
  const auto n = x.size();
  const T mean = x.mean();
  std::vector<std::pair<T, T>> bins;
  for (Eigen::Index k = 1; k <= n / 2; ++k) {
    std::complex<T> acc{};
    for (Eigen::Index t = 0; t < n; ++t) {
      const T angle = -T(2) * std::numbers::pi_v<T> * T(k * t) / T(n);
      acc += (x(t) - mean) * std::complex<T>(std::cos(angle), std::sin(angle));
    }
    bins.emplace_back(T(k) / T(n), std::norm(acc) / T(n));
  }
  return bins;
}

/// Interior strict local maxima.
template <typename Derived>
int count_peaks(const Eigen::MatrixBase<Derived>& x) {
  int peaks = 0;
  for (Eigen::Index i = 1; i + 1 < x.size(); ++i) {
    if (x(i - 1) < x(i) && x(i) > x(i + 1)) ++peaks;
  }
  return peaks;
}

/// The 27 window features of one channel, ordered as kFeatureAbbrev.
/// Every ratio whose denominator vanishes is reported as 0. A constant signal
/// has its mean taken as the sample value itself so dispersion terms are
/// exactly zero.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, kFeaturesPerChannel, 1>
channel_features(const Eigen::MatrixBase<Derived>& x) {
  using T = typename Derived::Scalar;
  const auto n = x.size();
  const T nn = T(n);
  const auto ratio = [](T num, T den) { return den == T(0) ? T(0) : num / den; };

  std::vector<T> sorted(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) sorted[static_cast<std::size_t>(i)] = x(i);
  std::sort(sorted.begin(), sorted.end());
  const T lo = sorted.front();
  const T hi = sorted.back();
  const bool constant = lo == hi;

  const T mean = constant ? lo : x.sum() / nn;
  const Eigen::Matrix<T, Eigen::Dynamic, 1> dev =
      constant ? Eigen::Matrix<T, Eigen::Dynamic, 1>::Zero(n)
               : Eigen::Matrix<T, Eigen::Dynamic, 1>(x.array() - mean);
  const T ss = dev.squaredNorm();
  const T var = n > 1 ? ss / (nn - T(1)) : T(0);
  const T sd = std::sqrt(var);

  const T p25 = percentile_sorted(sorted, 0.25);
  const T p50 = percentile_sorted(sorted, 0.50);
  const T p75 = percentile_sorted(sorted, 0.75);
  const T p95 = percentile_sorted(sorted, 0.95);

  std::vector<T> abs_dev_median(sorted.size());
  for (Eigen::Index i = 0; i < n; ++i)
    abs_dev_median[static_cast<std::size_t>(i)] = std::abs(x(i) - p50);
  std::sort(abs_dev_median.begin(), abs_dev_median.end());

  T total_power{}, weighted_freq{};
  const auto spectrum = periodogram(x);
  for (const auto& [f, p] : spectrum) {
    total_power += p;
    weighted_freq += f * p;
  }
  T median_freq{};
  if (total_power > T(0)) {
    T cumulative{};
    for (const auto& [f, p] : spectrum) {
      cumulative += p;
      if (cumulative >= total_power / T(2)) {
        median_freq = f;
        break;
      }
    }
  }

  const T energy = x.squaredNorm();
  const T power = energy / nn;
  const T rms = std::sqrt(power);
  const T m2 = ss / nn;
  const T m3 = dev.array().cube().sum() / nn;
  const T m4 = dev.array().square().square().sum() / nn;

  Eigen::Matrix<T, kFeaturesPerChannel, 1> f;
  f << mean, sd, var, ratio(sd, mean), hi, lo, hi - lo, ratio(hi - lo, hi + lo),
      p25, p50, p75, p95, p75 - p25, ratio(p75 - p25, p75 + p25),
      dev.cwiseAbs().sum() / nn, percentile_sorted(abs_dev_median, 0.5),
      ratio(weighted_freq, total_power), median_freq, power,
      T(count_peaks(x)), energy, rms, ratio(x.cwiseAbs().maxCoeff(), rms),
      std::sqrt(energy), ratio(mean, sd),
      m2 == T(0) ? T(0) : m3 / std::pow(m2, T(1.5)),
      m2 == T(0) ? T(0) : m4 / (m2 * m2);
  return f;
}

struct WindowRef {
  std::string subject_id;
  std::int64_t start_minute = 0;
  ActivityLevel level = ActivityLevel::Sedentary;

  friend bool operator==(const WindowRef&, const WindowRef&) = default;
};

struct FeatureVector {
  WindowRef window;
  std::vector<std::string> names;
  Eigen::VectorXd values;
};

/// Throws DegenerateWindow when a sample is non-finite.
FeatureVector extract_features(const Window& window, const BiometricCombo& combo,
                               bool include_activity);

/// Rows are windows, columns are named features.
struct FeatureMatrix {
  std::vector<std::string> names;
  std::vector<WindowRef> rows;
  Eigen::MatrixXd values;

  Eigen::Index column(std::string_view name) const;  // throws if absent
  std::vector<Eigen::Index> columns(const std::vector<std::string>& names) const;
  std::vector<std::string> subject_labels() const;
};

FeatureMatrix build_feature_matrix(const std::vector<Window>& windows,
                                   const BiometricCombo& combo,
                                   bool include_activity);

}  // namespace wearauth
