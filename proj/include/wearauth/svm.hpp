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

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wearauth/error.hpp"

namespace wearauth {

enum class KernelKind { QuadraticPoly, GaussianRBF };

struct KernelSpec {
  KernelKind kind = KernelKind::QuadraticPoly;
  double gamma = 1.0;
  int degree = 2;  // polynomial only

  static KernelSpec polynomial(double gamma = 1.0, int degree = 2) {
    return {KernelKind::QuadraticPoly, gamma, degree};
  }
  static KernelSpec gaussian(double gamma = 1.0) {
    return {KernelKind::GaussianRBF, gamma, 2};
  }
};

/// (1 + gamma <x,y>)^degree, or exp(-gamma |x-y|^2).
template <typename A, typename B>
typename A::Scalar kernel_eval(const KernelSpec& spec,
                               const Eigen::MatrixBase<A>& x,
                               const Eigen::MatrixBase<B>& y) {
  using T = typename A::Scalar;
  if (x.size() != y.size())
    throw Error(Errc::DimensionMismatch,
                "kernel operands have dimensions " + std::to_string(x.size()) +
                    " and " + std::to_string(y.size()));
  if (spec.kind == KernelKind::QuadraticPoly) {
    const T base = T(1) + T(spec.gamma) * x.dot(y);
    T out = T(1);
    for (int k = 0; k < spec.degree; ++k) out *= base;
    return out;
  }
  return std::exp(-T(spec.gamma) * (x - y).squaredNorm());
}

/// Gram matrix over the rows of \p points.
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& points);

struct TrainConfig {
  double C = 1.0;
  /// One-class outlier fraction. Values below 1/m (including 0) are raised to
  /// 1/m, the smallest admissible fraction.
  double nu = 0.0;
  double tol = 1e-3;
  /// Iteration budget is max_passes * m pair updates.
  int max_passes = 10000;
  std::uint64_t seed = 0;
  bool normalize = true;
  /// Fit a Platt sigmoid on 3-fold out-of-fold decision values (binary only).
  bool calibrate = false;
};

/// Per-feature affine map learnt on training data.
struct NormStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;  // sample SD, 1 where the feature is constant

  static NormStats fit(const Eigen::MatrixXd& x);
  static NormStats identity(Eigen::Index dim);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;  // rows are points
  Eigen::VectorXd apply_vector(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

struct PlattParams {
  double A = 0.0;
  double B = 0.0;
};

enum class ModelKind { Binary, Unary };

struct TrainedModel {
  ModelKind kind = ModelKind::Binary;
  std::string subject_id;
  KernelSpec kernel;
  NormStats norm;
  Eigen::MatrixXd support_vectors;  // normalised coordinates, one per row
  Eigen::VectorXd alphas;           // dual coefficients, >= 0
  Eigen::VectorXd labels;           // +1/-1 per support vector
  double bias = 0.0;                // binary: f = sum a_i y_i K + bias
  double rho = 0.0;                 // unary:  f = sum a_i K - rho
  double nu = 0.0;                  // effective outlier fraction (unary)
  std::optional<PlattParams> platt;
  std::vector<std::string> features;  // feature-set reference, column order
  TrainConfig config;
  std::size_t training_size = 0;

  Eigen::Index dimension() const { return norm.mean.size(); }
};

/// Full dual solution of the soft-margin problem
///   max sum a - 1/2 a'Qa,  Q_ij = y_i y_j K_ij,  0 <= a <= C,  y'a = 0.
struct BinaryDual {
  Eigen::VectorXd alpha;
  double bias = 0.0;
  double objective = 0.0;  // dual objective at alpha (maximisation form)
  double gap = 0.0;        // final maximal KKT violation
  long iterations = 0;
};

/// Dual of the nu-one-class problem
///   min 1/2 a'Ka,  0 <= a <= 1/(nu m),  sum a = 1.
struct OneClassDual {
  Eigen::VectorXd alpha;
  double rho = 0.0;
  double objective = 0.0;  // 1/2 a'Ka
  double gap = 0.0;
  long iterations = 0;
};

/// SMO with maximal-violating-pair plus second-order working-set selection.
/// Throws NoConvergence when the iteration budget runs out.
BinaryDual solve_binary_dual(const Eigen::MatrixXd& gram,
                             const Eigen::VectorXd& labels, double C,
                             double tol, long max_iterations);

OneClassDual solve_one_class_dual(const Eigen::MatrixXd& gram, double nu,
                                  double tol, long max_iterations);

/// Trains a soft-margin classifier; \p labels are +1 (genuine) / -1.
/// Throws SingleClass, NonFinite, NoConvergence.
TrainedModel train_binary(const Eigen::MatrixXd& x, const Eigen::VectorXd& labels,
                          const KernelSpec& kernel, const TrainConfig& config);

/// Trains a one-class model on genuine samples only.
TrainedModel train_unary(const Eigen::MatrixXd& x, const KernelSpec& kernel,
                         const TrainConfig& config);

/// Effective nu after the 1/m floor.
double effective_nu(double nu, std::size_t m);

/// Positive means genuine. \p x is in raw (unnormalised) feature space.
double decision_value(const TrainedModel& model,
                      const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd decision_values(const TrainedModel& model, const Eigen::MatrixXd& x);

/// Regularised maximum-likelihood sigmoid P(y=1|f) = 1/(1+exp(A f + B)),
/// Newton iterations with backtracking.
PlattParams fit_platt(std::span<const double> decision_values,
                      std::span<const double> labels);

double platt_probability(const PlattParams& platt, double f);

/// Throws PlattNotFitted when the model carries no sigmoid.
double predict_proba(const TrainedModel& model,
                     const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd predict_probas(const TrainedModel& model, const Eigen::MatrixXd& x);

}  // namespace wearauth
