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
#include "wearauth/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "wearauth/error.hpp"

namespace wearauth {

std::string to_string(SelectionApproach approach) {
  switch (approach) {
    case SelectionApproach::KS: return "KS";
    case SelectionApproach::PC: return "PC";
    case SelectionApproach::SD: return "SD";
  }
  return "KS";
}

SelectionApproach parse_selection_approach(std::string_view text) {
  std::string s(text);
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (s == "KS") return SelectionApproach::KS;
  if (s == "PC") return SelectionApproach::PC;
  if (s == "SD") return SelectionApproach::SD;
  throw Error(Errc::InvalidArgument,
              "unknown selection approach '" + std::string(text) + "'");
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw Error(Errc::EmptySample, "KS statistic needs two non-empty samples");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const auto na = static_cast<double>(sa.size());
  const auto nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= v) ++i;
    while (j < sb.size() && sb[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  // Below this the survival function equals 1 to far better than 1e-12 and
  // the alternating series converges too slowly to be worth summing.
  if (lambda < 1e-2) return 1.0;
  const double a = -2.0 * lambda * lambda;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j < 100000; ++j) {
    const double term = std::exp(a * j * j);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue(double d, std::size_t n1, std::size_t n2) {
  if (n1 == 0 || n2 == 0)
    throw Error(Errc::EmptySample, "KS p-value needs non-empty samples");
  if (d <= 0.0) return 1.0;
  const double ne = static_cast<double>(n1) * static_cast<double>(n2) /
                    static_cast<double>(n1 + n2);
  const double root = std::sqrt(ne);
  return kolmogorov_q((root + 0.12 + 0.11 / root) * d);
}

namespace {

struct SubjectIndex {
  std::vector<int> row_subject;        // subject index per row
  std::vector<std::size_t> counts;     // rows per subject
  std::size_t size() const { return counts.size(); }
};

SubjectIndex index_subjects(const std::vector<std::string>& subjects) {
  std::map<std::string, int> ids;
  for (const auto& s : subjects) ids.emplace(s, 0);
  int next = 0;
  for (auto& [_, id] : ids) id = next++;
  SubjectIndex idx;
  idx.counts.assign(ids.size(), 0);
  idx.row_subject.reserve(subjects.size());
  for (const auto& s : subjects) {
    const int id = ids.at(s);
    idx.row_subject.push_back(id);
    ++idx.counts[static_cast<std::size_t>(id)];
  }
  return idx;
}

void check_shape(const Eigen::MatrixXd& features,
                 const std::vector<std::string>& names) {
  if (static_cast<std::size_t>(features.cols()) != names.size())
    throw Error(Errc::DimensionMismatch,
                "feature matrix has " + std::to_string(features.cols()) +
                    " columns but " + std::to_string(names.size()) + " names");
}

std::vector<Eigen::Index> kept_columns(const std::vector<std::string>& names,
                                       const FeatureSetSpec& kept) {
  std::vector<Eigen::Index> cols;
  for (const auto& name : kept.selected) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
      throw Error(Errc::InvalidArgument,
                  "selected feature '" + name + "' not among candidates");
    cols.push_back(static_cast<Eigen::Index>(it - names.begin()));
  }
  return cols;
}

}  // namespace

FeatureSetSpec select_ks(const Eigen::MatrixXd& features,
                         const std::vector<std::string>& names,
                         const std::vector<std::string>& subjects,
                         const SelectionParams& params) {
  check_shape(features, names);
  if (static_cast<std::size_t>(features.rows()) != subjects.size())
    throw Error(Errc::DimensionMismatch, "one subject label per row required");
  if (!(params.alpha > 0.0 && params.alpha < 1.0))
    throw Error(Errc::InvalidArgument, "alpha must lie in (0, 1)");
  if (!(params.tau > 0.0 && params.tau <= 1.0))
    throw Error(Errc::InvalidArgument, "tau must lie in (0, 1]");
  const auto idx = index_subjects(subjects);
  if (idx.size() < 2)
    throw Error(Errc::InvalidArgument, "KS selection needs at least 2 subjects");

  const auto n = static_cast<std::size_t>(features.rows());
  const auto n_subjects = idx.size();
  const double needed = params.tau * static_cast<double>(n_subjects);

  FeatureSetSpec out;
  out.approach = SelectionApproach::KS;
  out.params = params;

  std::vector<std::size_t> order(n);
  for (Eigen::Index col = 0; col < features.cols(); ++col) {
    const auto column = features.col(col);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return column(static_cast<Eigen::Index>(a)) < column(static_cast<Eigen::Index>(b));
    });

    // One sorted pass per subject: walk tied groups, counting how many rows of
    // the subject and of the rest lie at or below the current value.
    int significant = 0;
    for (std::size_t s = 0; s < n_subjects; ++s) {
      const auto na = static_cast<double>(idx.counts[s]);
      const auto nb = static_cast<double>(n - idx.counts[s]);
      std::size_t ca = 0, cb = 0;
      double d = 0.0;
      std::size_t k = 0;
      while (k < n) {
        const double v = column(static_cast<Eigen::Index>(order[k]));
        while (k < n && column(static_cast<Eigen::Index>(order[k])) == v) {
          if (static_cast<std::size_t>(idx.row_subject[order[k]]) == s) ++ca; else ++cb;
          ++k;
        }
        d = std::max(d, std::abs(static_cast<double>(ca) / na -
                                 static_cast<double>(cb) / nb));
      }
      if (ks_pvalue(d, idx.counts[s], n - idx.counts[s]) < params.alpha)
        ++significant;
    }
    if (static_cast<double>(significant) >= needed - 1e-9) {
      out.selected.push_back(names[static_cast<std::size_t>(col)]);
      out.ks_significance.push_back(significant);
    }
  }
  if (out.selected.empty())
    throw Error(Errc::NoFeatureSurvives,
                "no feature reached p < alpha for a tau fraction of subjects");
  return out;
}

double pearson(const Eigen::Ref<const Eigen::VectorXd>& a,
               const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size())
    throw Error(Errc::DimensionMismatch, "pearson: length mismatch");
  if (a.size() < 2) return 0.0;
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double saa = da.square().sum();
  const double sbb = db.square().sum();
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp((da * db).sum() / std::sqrt(saa * sbb), -1.0, 1.0);
}

FeatureSetSpec prune_pearson(const Eigen::MatrixXd& features,
                             const std::vector<std::string>& names,
                             const FeatureSetSpec& kept, double rho) {
  check_shape(features, names);
  if (!(rho > 0.0 && rho < 1.0))
    throw Error(Errc::InvalidArgument, "rho must lie in (0, 1)");
  const auto cols = kept_columns(names, kept);
  const auto k = cols.size();
  const auto ks_count = [&](std::size_t i) {
    return kept.ks_significance.size() == k ? kept.ks_significance[i] : 0;
  };

  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                            static_cast<Eigen::Index>(k));
  struct Pair {
    double r;
    std::size_t i, j;
  };
  std::vector<Pair> conflicts;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double v = std::abs(pearson(features.col(cols[i]), features.col(cols[j])));
      r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
      if (v > rho) conflicts.push_back({v, i, j});
    }
  }
  std::stable_sort(conflicts.begin(), conflicts.end(),
                   [](const Pair& a, const Pair& b) { return a.r > b.r; });

  std::vector<bool> alive(k, true);
  for (const auto& p : conflicts) {
    if (!alive[p.i] || !alive[p.j]) continue;
    const bool drop_i = ks_count(p.i) < ks_count(p.j);
    alive[drop_i ? p.i : p.j] = false;
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (alive[i]) continue;
    bool compatible = true;
    for (std::size_t j = 0; j < k && compatible; ++j) {
      if (alive[j] && r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > rho)
        compatible = false;
    }
    if (compatible) alive[i] = true;
  }

  FeatureSetSpec out = kept;
  out.approach = SelectionApproach::PC;
  out.params.rho = rho;
  out.selected.clear();
  out.ks_significance.clear();
  for (std::size_t i = 0; i < k; ++i) {
    if (!alive[i]) continue;
    out.selected.push_back(kept.selected[i]);
    if (kept.ks_significance.size() == k) out.ks_significance.push_back(ks_count(i));
  }
  return out;
}

Eigen::VectorXd sd_scores(const Eigen::MatrixXd& features,
                          const std::vector<std::string>& subjects) {
  if (static_cast<std::size_t>(features.rows()) != subjects.size())
    throw Error(Errc::DimensionMismatch, "one subject label per row required");
  const auto idx = index_subjects(subjects);
  const auto n_subjects = static_cast<Eigen::Index>(idx.size());
  const auto n = features.rows();
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(features.cols());
  if (n < 2 || n_subjects < 2) return scores;

  for (Eigen::Index col = 0; col < features.cols(); ++col) {
    const Eigen::ArrayXd x = features.col(col).array();
    const double mean = x.mean();
    const double sd = std::sqrt((x - mean).square().sum() / static_cast<double>(n - 1));
    if (sd == 0.0) continue;
    const Eigen::ArrayXd z = (x - mean) / sd;
    Eigen::ArrayXd sums = Eigen::ArrayXd::Zero(n_subjects);
    for (Eigen::Index row = 0; row < n; ++row)
      sums(idx.row_subject[static_cast<std::size_t>(row)]) += z(row);
    Eigen::ArrayXd means(n_subjects);
    for (Eigen::Index s = 0; s < n_subjects; ++s)
      means(s) = sums(s) / static_cast<double>(idx.counts[static_cast<std::size_t>(s)]);
    scores(col) = std::sqrt((means - means.mean()).square().sum() /
                            static_cast<double>(n_subjects - 1));
  }
  return scores;
}

FeatureSetSpec select_sd(const Eigen::MatrixXd& features,
                         const std::vector<std::string>& names,
                         const std::vector<std::string>& subjects,
                         const FeatureSetSpec& kept, int top_k) {
  check_shape(features, names);
  if (top_k < 1) throw Error(Errc::InvalidArgument, "top_k must be >= 1");
  if (static_cast<std::size_t>(top_k) > kept.selected.size())
    throw Error(Errc::TopKExceedsAvailable,
                "top_k " + std::to_string(top_k) + " exceeds the " +
                    std::to_string(kept.selected.size()) + " kept features");
  const auto cols = kept_columns(names, kept);
  Eigen::MatrixXd sub(features.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i)
    sub.col(static_cast<Eigen::Index>(i)) = features.col(cols[i]);
  const Eigen::VectorXd scores = sd_scores(sub, subjects);

  std::vector<std::size_t> order(cols.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores(static_cast<Eigen::Index>(a)) > scores(static_cast<Eigen::Index>(b));
  });

  FeatureSetSpec out = kept;
  out.approach = SelectionApproach::SD;
  out.params.sd_top_k = top_k;
  out.selected.clear();
  out.ks_significance.clear();
  for (int r = 0; r < top_k; ++r) {
    const auto i = order[static_cast<std::size_t>(r)];
    out.selected.push_back(kept.selected[i]);
    if (kept.ks_significance.size() == cols.size())
      out.ks_significance.push_back(kept.ks_significance[i]);
  }
  return out;
}

}  // namespace wearauth
