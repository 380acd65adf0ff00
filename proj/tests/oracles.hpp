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
// Deliberately naive reference implementations used by the tests. Nothing
// here calls into the library; keep it that way.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// ---------------------------------------------------------------- features

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Inclusive linear-interpolation percentile, written from the rank formula
// rank = 1 + q (n - 1) on 1-based ranks.
inline double percentile(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  const double rank = 1.0 + q * static_cast<double>(x.size() - 1);
  const double below = std::floor(rank);
  const std::size_t i = static_cast<std::size_t>(below) - 1;
  if (i + 1 >= x.size()) return x.back();
  return x[i] + (rank - below) * (x[i + 1] - x[i]);
}

inline double median(const std::vector<double>& x) { return percentile(x, 0.5); }

// Direct real DFT of the mean-removed signal, positive bins only.
inline void spectrum(const std::vector<double>& x, std::vector<double>& freq,
                     std::vector<double>& power) {
  const std::size_t n = x.size();
  const double m = mean(x);
  freq.clear();
  power.clear();
  for (std::size_t k = 1; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double a = 2.0 * M_PI * static_cast<double>(k * t) / static_cast<double>(n);
      re += (x[t] - m) * std::cos(a);
      im -= (x[t] - m) * std::sin(a);
    }
    freq.push_back(static_cast<double>(k) / static_cast<double>(n));
    power.push_back((re * re + im * im) / static_cast<double>(n));
  }
}

inline double safe_div(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

// All 27 features, in the library's documented order.
inline std::vector<double> features(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mu = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  const double var = ss / (n - 1.0);
  const double sd = std::sqrt(var);
  const double mx = *std::max_element(x.begin(), x.end());
  const double mn = *std::min_element(x.begin(), x.end());
  const double p25 = percentile(x, 0.25), p50 = percentile(x, 0.5);
  const double p75 = percentile(x, 0.75), p95 = percentile(x, 0.95);
  double mad_mu = 0.0;
  std::vector<double> dev_med;
  for (double v : x) {
    mad_mu += std::fabs(v - mu) / n;
    dev_med.push_back(std::fabs(v - p50));
  }
  std::vector<double> f, p;
  spectrum(x, f, p);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  double fw = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) fw += f[i] * p[i];
  double fmed = 0.0;
  if (total > 0.0) {
    double c = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      c += p[i];
      if (c >= total / 2.0) {
        fmed = f[i];
        break;
      }
    }
  }
  int peaks = 0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i)
    if (x[i] > x[i - 1] && x[i] > x[i + 1]) ++peaks;
  double e = 0.0, amax = 0.0;
  for (double v : x) {
    e += v * v;
    amax = std::max(amax, std::fabs(v));
  }
  const double pw = e / n;
  const double rms = std::sqrt(pw);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mu;
    m2 += d * d / n;
    m3 += d * d * d / n;
    m4 += d * d * d * d / n;
  }
  return {mu,
          sd,
          var,
          safe_div(sd, mu),
          mx,
          mn,
          mx - mn,
          safe_div(mx - mn, mx + mn),
          p25,
          p50,
          p75,
          p95,
          p75 - p25,
          safe_div(p75 - p25, p75 + p25),
          mad_mu,
          median(dev_med),
          safe_div(fw, total),
          fmed,
          pw,
          static_cast<double>(peaks),
          e,
          rms,
          safe_div(amax, rms),
          std::sqrt(e),
          safe_div(mu, sd),
          m2 == 0.0 ? 0.0 : m3 / std::pow(m2, 1.5),
          m2 == 0.0 ? 0.0 : m4 / (m2 * m2)};
}

// |a - b| <= tol, relative once magnitudes exceed 1.
inline bool close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}

// ---------------------------------------------------------------------- KS

// Evaluates both ECDFs at every observed value.
inline double ks_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pts = a;
  pts.insert(pts.end(), b.begin(), b.end());
  double best = 0.0;
  for (double t : pts) {
    const auto ca = std::count_if(a.begin(), a.end(), [&](double v) { return v <= t; });
    const auto cb = std::count_if(b.begin(), b.end(), [&](double v) { return v <= t; });
    const double d = std::fabs(static_cast<double>(ca) / static_cast<double>(a.size()) -
                               static_cast<double>(cb) / static_cast<double>(b.size()));
    best = std::max(best, d);
  }
  return best;
}

// Kolmogorov survival function, summed until terms fall below 1e-30.
inline double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  const long double l2 = static_cast<long double>(lambda) * lambda;
  long double s = 0.0L;
  for (long j = 1;; ++j) {
    const long double term = std::exp(-2.0L * j * j * l2);
    s += (j % 2 == 1) ? term : -term;
    if (term < 1e-30L) break;
  }
  return static_cast<double>(std::clamp(2.0L * s, 0.0L, 1.0L));
}

inline double ks_pvalue(double d, std::size_t n1, std::size_t n2) {
  const double ne = static_cast<double>(n1) * static_cast<double>(n2) /
                    static_cast<double>(n1 + n2);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  return kolmogorov_q(lambda);
}

// --------------------------------------------------------------------- QP

// Exact maximiser of  p'a - 1/2 a'Qa  over  0 <= a <= upper, y'a = delta,
// for concave Q, by enumerating which coordinates sit at 0, at the upper
// bound or strictly inside, and solving the face's stationarity system.
// Exponential in n; intended for n <= 8.
struct QpSolution {
  Eigen::VectorXd alpha;
  double objective = -std::numeric_limits<double>::infinity();
};

inline QpSolution box_qp_enumerate(const Eigen::MatrixXd& Q, const Eigen::VectorXd& p,
                                   const Eigen::VectorXd& y, double upper, double delta) {
  const int n = static_cast<int>(Q.rows());
  int total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  QpSolution best;
  const double feas = 1e-9 * std::max(1.0, upper);
  for (int code = 0; code < total; ++code) {
    std::vector<int> state(n);
    int c = code;
    for (int i = 0; i < n; ++i) {
      state[i] = c % 3;  // 0 lower, 1 upper, 2 free
      c /= 3;
    }
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    std::vector<int> free;
    for (int i = 0; i < n; ++i) {
      if (state[i] == 1) a(i) = upper;
      if (state[i] == 2) free.push_back(i);
    }
    const int k = static_cast<int>(free.size());
    if (k == 0) {
      if (std::fabs(y.dot(a) - delta) > feas) continue;
    } else {
      // [Q_FF  y_F] [a_F]   [p_F - Q_FB a_B]
      // [y_F'   0 ] [mu ] = [delta - y_B' a_B]
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k + 1, k + 1);
      Eigen::VectorXd r(k + 1);
      const Eigen::VectorXd qa = Q * a;
      double ya = y.dot(a);
      for (int s = 0; s < k; ++s) {
        for (int t = 0; t < k; ++t) M(s, t) = Q(free[s], free[t]);
        M(s, k) = y(free[s]);
        M(k, s) = y(free[s]);
        r(s) = p(free[s]) - qa(free[s]);
      }
      r(k) = delta - ya;
      const Eigen::VectorXd sol = M.completeOrthogonalDecomposition().solve(r);
      if ((M * sol - r).norm() > 1e-8 * std::max(1.0, r.norm())) continue;
      bool inside = true;
      for (int s = 0; s < k; ++s) {
        if (sol(s) < -feas || sol(s) > upper + feas) inside = false;
        a(free[s]) = std::clamp(sol(s), 0.0, upper);
      }
      if (!inside) continue;
      if (std::fabs(y.dot(a) - delta) > 1e-7) continue;
    }
    const double obj = p.dot(a) - 0.5 * a.dot(Q * a);
    if (obj > best.objective) {
      best.objective = obj;
      best.alpha = a;
    }
  }
  return best;
}

// ------------------------------------------------------------- statistics

inline double sample_sd(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

// Stationary distribution of a row-stochastic matrix by repeated
// multiplication from the uniform vector.
inline Eigen::RowVector4d stationary(const Eigen::Matrix4d& T, int steps = 200000) {
  Eigen::RowVector4d pi = Eigen::RowVector4d::Constant(0.25);
  for (int i = 0; i < steps; ++i) pi = pi * T;
  return pi;
}

}  // namespace oracle
