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
#include "wearauth/svm.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "wearauth/rng.hpp"

namespace wearauth {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

/// Solves  min 1/2 a'Qa + p'a  s.t.  y'a = const,  0 <= a <= upper,
/// starting from a feasible alpha. Q is the label-signed Gram matrix.
class SmoSolver {
 public:
  SmoSolver(const Eigen::MatrixXd& q, const Eigen::VectorXd& p,
            const Eigen::VectorXd& y, double upper)
      : q_(q), p_(p), y_(y), upper_(upper) {}

  struct Result {
    Eigen::VectorXd alpha;
    double r = 0.0;  // rho in the f = ... - r convention
    double objective = 0.0;
    double gap = 0.0;
    long iterations = 0;
  };

  Result solve(Eigen::VectorXd alpha, double tol, long max_iterations) {
    alpha_ = std::move(alpha);
    grad_ = q_ * alpha_ + p_;
    long iter = 0;
    while (true) {
      int i = -1, j = -1;
      double gap = 0.0;
      if (!select_working_set(tol, i, j, gap)) {
        // Remove accumulated drift before declaring convergence.
        grad_ = q_ * alpha_ + p_;
        if (!select_working_set(tol, i, j, gap)) {
          Result res;
          res.gap = gap;
          res.iterations = iter;
          res.r = compute_r();
          res.objective = 0.5 * alpha_.dot(grad_ + p_);
          res.alpha = alpha_;
          return res;
        }
      }
      if (iter >= max_iterations)
        throw Error(Errc::NoConvergence,
                    "SMO did not converge within " +
                        std::to_string(max_iterations) + " iterations (gap " +
                        std::to_string(gap) + ")");
      update_pair(i, j);
      ++iter;
    }
  }

 private:
  bool at_upper(Eigen::Index t) const { return alpha_(t) >= upper_; }
  bool at_lower(Eigen::Index t) const { return alpha_(t) <= 0.0; }

  // Returns false when the maximal KKT violation is below tol.
  bool select_working_set(double tol, int& out_i, int& out_j, double& gap) const {
    const auto n = alpha_.size();
    double gmax = -kInf, gmax2 = -kInf, obj_min = kInf;
    Eigen::Index gmax_idx = -1, gmin_idx = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y_(t) > 0) {
        if (!at_upper(t) && -grad_(t) >= gmax) {
          gmax = -grad_(t);
          gmax_idx = t;
        }
      } else if (!at_lower(t) && grad_(t) >= gmax) {
        gmax = grad_(t);
        gmax_idx = t;
      }
    }
    const Eigen::Index i = gmax_idx;
    for (Eigen::Index t = 0; t < n; ++t) {
      double grad_diff = 0.0, quad = 0.0;
      if (y_(t) > 0) {
        if (at_lower(t)) continue;
        grad_diff = gmax + grad_(t);
        gmax2 = std::max(gmax2, grad_(t));
        if (i < 0 || grad_diff <= 0) continue;
        quad = q_(i, i) + q_(t, t) - 2.0 * y_(i) * q_(i, t);
      } else {
        if (at_upper(t)) continue;
        grad_diff = gmax - grad_(t);
        gmax2 = std::max(gmax2, -grad_(t));
        if (i < 0 || grad_diff <= 0) continue;
        quad = q_(i, i) + q_(t, t) + 2.0 * y_(i) * q_(i, t);
      }
      const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
      if (obj <= obj_min) {
        obj_min = obj;
        gmin_idx = t;
      }
    }
    gap = (gmax_idx < 0 || gmax2 == -kInf) ? 0.0 : gmax + gmax2;
    if (gap < tol || gmin_idx < 0) return false;
    out_i = static_cast<int>(i);
    out_j = static_cast<int>(gmin_idx);
    return true;
  }

  void update_pair(Eigen::Index i, Eigen::Index j) {
    const double c = upper_;
    const double old_i = alpha_(i), old_j = alpha_(j);
    double& ai = alpha_(i);
    double& aj = alpha_(j);
    if (y_(i) != y_(j)) {
      double quad = q_(i, i) + q_(j, j) + 2.0 * q_(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (-grad_(i) - grad_(j)) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) { aj = 0; ai = diff; }
      } else if (ai < 0) {
        ai = 0; aj = -diff;
      }
      if (diff > 0) {
        if (ai > c) { ai = c; aj = c - diff; }
      } else if (aj > c) {
        aj = c; ai = c + diff;
      }
    } else {
      double quad = q_(i, i) + q_(j, j) - 2.0 * q_(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (grad_(i) - grad_(j)) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c) {
        if (ai > c) { ai = c; aj = sum - c; }
      } else if (aj < 0) {
        aj = 0; ai = sum;
      }
      if (sum > c) {
        if (aj > c) { aj = c; ai = sum - c; }
      } else if (ai < 0) {
        ai = 0; aj = sum;
      }
    }
    const double di = ai - old_i, dj = aj - old_j;
    grad_ += q_.col(i) * di + q_.col(j) * dj;
  }

  double compute_r() const {
    double ub = kInf, lb = -kInf, sum_free = 0.0;
    int n_free = 0;
    for (Eigen::Index t = 0; t < alpha_.size(); ++t) {
      const double yg = y_(t) * grad_(t);
      if (at_upper(t)) {
        if (y_(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (at_lower(t)) {
        if (y_(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    return n_free > 0 ? sum_free / n_free : (ub + lb) / 2.0;
  }

  const Eigen::MatrixXd& q_;
  const Eigen::VectorXd& p_;
  const Eigen::VectorXd& y_;
  double upper_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd grad_;
};

void require_finite(const Eigen::MatrixXd& x) {
  if (!x.allFinite())
    throw Error(Errc::NonFinite, "training data contains non-finite values");
}

long iteration_budget(const TrainConfig& config, Eigen::Index m) {
  return static_cast<long>(config.max_passes) * std::max<long>(m, 1);
}

}  // namespace

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& points) {
  const auto n = points.rows();
  Eigen::MatrixXd k(n, n);
  if (spec.kind == KernelKind::QuadraticPoly) {
    const Eigen::MatrixXd inner = points * points.transpose();
    const Eigen::ArrayXXd base = 1.0 + spec.gamma * inner.array();
    Eigen::ArrayXXd acc = Eigen::ArrayXXd::Ones(n, n);
    for (int d = 0; d < spec.degree; ++d) acc *= base;
    k = acc.matrix();
  } else {
    const Eigen::VectorXd sq = points.rowwise().squaredNorm();
    const Eigen::MatrixXd inner = points * points.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double d2 = std::max(0.0, sq(i) + sq(j) - 2.0 * inner(i, j));
        k(i, j) = std::exp(-spec.gamma * d2);
      }
      k(i, i) = 1.0;
    }
  }
  // Symmetrise so that the solver sees an exactly symmetric matrix.
  return 0.5 * (k + k.transpose());
}

NormStats NormStats::fit(const Eigen::MatrixXd& x) {
  NormStats s;
  const auto m = x.rows();
  s.mean = x.colwise().mean().transpose();
  s.scale = Eigen::VectorXd::Ones(x.cols());
  if (m > 1) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const double sd = std::sqrt((x.col(c).array() - s.mean(c)).square().sum() /
                                  static_cast<double>(m - 1));
      if (sd > 0.0) s.scale(c) = sd;
    }
  }
  return s;
}

NormStats NormStats::identity(Eigen::Index dim) {
  return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

Eigen::MatrixXd NormStats::apply(const Eigen::MatrixXd& x) const {
  return ((x.rowwise() - mean.transpose()).array().rowwise() /
          scale.transpose().array())
      .matrix();
}

Eigen::VectorXd NormStats::apply_vector(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return ((x - mean).array() / scale.array()).matrix();
}

BinaryDual solve_binary_dual(const Eigen::MatrixXd& gram,
                             const Eigen::VectorXd& labels, double C,
                             double tol, long max_iterations) {
  const auto m = labels.size();
  if (gram.rows() != m || gram.cols() != m)
    throw Error(Errc::DimensionMismatch, "Gram matrix does not match labels");
  if (!(C > 0.0)) throw Error(Errc::InvalidArgument, "C must be positive");
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "tol must be positive");
  const Eigen::MatrixXd q = (labels * labels.transpose()).cwiseProduct(gram);
  const Eigen::VectorXd p = -Eigen::VectorXd::Ones(m);
  SmoSolver solver(q, p, labels, C);
  auto res = solver.solve(Eigen::VectorXd::Zero(m), tol, max_iterations);
  BinaryDual out;
  out.alpha = std::move(res.alpha);
  out.bias = -res.r;
  out.objective = -res.objective;
  out.gap = res.gap;
  out.iterations = res.iterations;
  return out;
}

OneClassDual solve_one_class_dual(const Eigen::MatrixXd& gram, double nu,
                                  double tol, long max_iterations) {
  const auto m = gram.rows();
  if (gram.cols() != m) throw Error(Errc::DimensionMismatch, "Gram matrix not square");
  if (m < 1) throw Error(Errc::InvalidArgument, "one-class training needs samples");
  if (!(nu > 0.0 && nu <= 1.0))
    throw Error(Errc::InvalidArgument, "nu must lie in (0, 1]");
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "tol must be positive");

  // Solved with box [0, 1] and sum nu*m, then rescaled to sum 1.
  const double total = nu * static_cast<double>(m);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
  const auto full = static_cast<Eigen::Index>(total);
  for (Eigen::Index i = 0; i < std::min(full, m); ++i) alpha(i) = 1.0;
  if (full < m) alpha(full) = total - static_cast<double>(full);

  const Eigen::VectorXd p = Eigen::VectorXd::Zero(m);
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(m);
  SmoSolver solver(gram, p, y, 1.0);
  auto res = solver.solve(std::move(alpha), tol, max_iterations);
  OneClassDual out;
  out.alpha = res.alpha / total;
  out.rho = res.r / total;
  out.objective = res.objective / (total * total);
  out.gap = res.gap / total;
  out.iterations = res.iterations;
  return out;
}

double effective_nu(double nu, std::size_t m) {
  const double floor = 1.0 / static_cast<double>(std::max<std::size_t>(m, 1));
  return std::max(nu, floor);
}

TrainedModel train_binary(const Eigen::MatrixXd& x, const Eigen::VectorXd& labels,
                          const KernelSpec& kernel, const TrainConfig& config) {
  if (x.rows() != labels.size())
    throw Error(Errc::DimensionMismatch, "one label per training row required");
  if (!(kernel.gamma > 0.0)) throw Error(Errc::InvalidArgument, "gamma must be positive");
  require_finite(x);
  Eigen::Index n_pos = 0, n_neg = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels(i) == 1.0) ++n_pos;
    else if (labels(i) == -1.0) ++n_neg;
    else throw Error(Errc::InvalidArgument, "labels must be +1 or -1");
  }
  if (n_pos == 0 || n_neg == 0)
    throw Error(Errc::SingleClass, "binary training needs both classes");

  TrainedModel model;
  model.kind = ModelKind::Binary;
  model.kernel = kernel;
  model.config = config;
  model.training_size = static_cast<std::size_t>(x.rows());
  model.norm = config.normalize ? NormStats::fit(x) : NormStats::identity(x.cols());
  const Eigen::MatrixXd xn = model.norm.apply(x);
  const auto dual = solve_binary_dual(gram_matrix(kernel, xn), labels, config.C,
                                      config.tol, iteration_budget(config, x.rows()));

  std::vector<Eigen::Index> sv;
  for (Eigen::Index i = 0; i < dual.alpha.size(); ++i)
    if (dual.alpha(i) > 0.0) sv.push_back(i);
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
  model.alphas.resize(static_cast<Eigen::Index>(sv.size()));
  model.labels.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    model.support_vectors.row(r) = xn.row(sv[k]);
    model.alphas(r) = dual.alpha(sv[k]);
    model.labels(r) = labels(sv[k]);
  }
  model.bias = dual.bias;

  if (config.calibrate) {
    constexpr int kFolds = 3;
    const auto m = static_cast<std::size_t>(x.rows());
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(config.seed, 0x9147));
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<int> fold(m);
    for (std::size_t k = 0; k < m; ++k) fold[order[k]] = static_cast<int>(k % kFolds);

    TrainConfig inner = config;
    inner.calibrate = false;
    std::vector<double> oof(m), oof_labels(m);
    for (int f = 0; f < kFolds; ++f) {
      std::vector<Eigen::Index> train_rows, test_rows;
      for (std::size_t k = 0; k < m; ++k)
        (fold[k] == f ? test_rows : train_rows).push_back(static_cast<Eigen::Index>(k));
      if (test_rows.empty()) continue;
      const Eigen::MatrixXd xt = x(train_rows, Eigen::all);
      const Eigen::VectorXd yt = labels(train_rows);
      const auto sub = train_binary(xt, yt, kernel, inner);
      for (auto r : test_rows) {
        oof[static_cast<std::size_t>(r)] = decision_value(sub, x.row(r).transpose());
        oof_labels[static_cast<std::size_t>(r)] = labels(r);
      }
    }
    model.platt = fit_platt(oof, oof_labels);
  }
  return model;
}

TrainedModel train_unary(const Eigen::MatrixXd& x, const KernelSpec& kernel,
                         const TrainConfig& config) {
  if (x.rows() < 2) throw Error(Errc::InvalidArgument, "one-class training needs m >= 2");
  if (!(kernel.gamma > 0.0)) throw Error(Errc::InvalidArgument, "gamma must be positive");
  if (config.nu > 1.0 || config.nu < 0.0)
    throw Error(Errc::InvalidArgument, "nu must lie in [0, 1]");
  require_finite(x);

  TrainedModel model;
  model.kind = ModelKind::Unary;
  model.kernel = kernel;
  model.config = config;
  model.training_size = static_cast<std::size_t>(x.rows());
  model.nu = effective_nu(config.nu, model.training_size);
  model.norm = config.normalize ? NormStats::fit(x) : NormStats::identity(x.cols());
  const Eigen::MatrixXd xn = model.norm.apply(x);
  const auto dual = solve_one_class_dual(gram_matrix(kernel, xn), model.nu,
                                         config.tol, iteration_budget(config, x.rows()));
  std::vector<Eigen::Index> sv;
  for (Eigen::Index i = 0; i < dual.alpha.size(); ++i)
    if (dual.alpha(i) > 0.0) sv.push_back(i);
  model.support_vectors = xn(sv, Eigen::all);
  model.alphas = dual.alpha(sv);
  model.labels = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(sv.size()));
  model.rho = dual.rho;
  return model;
}

double decision_value(const TrainedModel& model,
                      const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.dimension())
    throw Error(Errc::DimensionMismatch,
                "probe has dimension " + std::to_string(x.size()) +
                    ", model expects " + std::to_string(model.dimension()));
  const Eigen::VectorXd xn = model.norm.apply_vector(x);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < model.support_vectors.rows(); ++i) {
    sum += model.alphas(i) * model.labels(i) *
           kernel_eval(model.kernel, model.support_vectors.row(i).transpose(), xn);
  }
  return model.kind == ModelKind::Binary ? sum + model.bias : sum - model.rho;
}

Eigen::VectorXd decision_values(const TrainedModel& model, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) out(r) = decision_value(model, x.row(r).transpose());
  return out;
}

PlattParams fit_platt(std::span<const double> f, std::span<const double> labels) {
  if (f.size() != labels.size())
    throw Error(Errc::DimensionMismatch, "one label per decision value required");
  double prior1 = 0, prior0 = 0;
  for (double y : labels) (y > 0 ? prior1 : prior0) += 1.0;
  if (prior1 == 0 || prior0 == 0)
    throw Error(Errc::SingleClass, "Platt fitting needs both classes");

  constexpr int kMaxIter = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  constexpr double kEps = 1e-8;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  const auto n = f.size();
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] > 0 ? hi : lo;

  // Negative log-likelihood written to avoid overflow in exp().
  const auto objective = [&](double a, double b) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = f[i] * a + b;
      v += z >= 0 ? t[i] * z + std::log1p(std::exp(-z))
                  : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return v;
  };

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(a, b);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = f[i] * a + b;
      double p, q;
      if (z >= 0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += f[i] * f[i] * d2;
      h22 += d2;
      h21 += f[i] * d2;
      const double d1 = t[i] - p;
      g1 += f[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= kMinStep) {
      const double na = a + step * da, nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return {a, b};
}

double platt_probability(const PlattParams& platt, double f) {
  const double z = f * platt.A + platt.B;
  return z >= 0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

double predict_proba(const TrainedModel& model,
                     const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (!model.platt)
    throw Error(Errc::PlattNotFitted, "model has no probability calibration");
  return platt_probability(*model.platt, decision_value(model, x));
}

Eigen::VectorXd predict_probas(const TrainedModel& model, const Eigen::MatrixXd& x) {
  if (!model.platt)
    throw Error(Errc::PlattNotFitted, "model has no probability calibration");
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    out(r) = platt_probability(*model.platt, decision_value(model, x.row(r).transpose()));
  return out;
}

}  // namespace wearauth
