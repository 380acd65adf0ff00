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

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wearauth/error.hpp"

namespace wearauth {

enum class SelectionApproach { KS, PC, SD };

std::string to_string(SelectionApproach approach);
SelectionApproach parse_selection_approach(std::string_view text);

struct SelectionParams {
  double alpha = 0.05;  // KS significance level
  double tau = 0.5;     // fraction of subjects that must reach significance
  double rho = 0.9;     // Pearson redundancy threshold
  int sd_top_k = 20;
};

/// A selected, ordered feature list. ks_significance[i] is the number of
/// subjects for which selected[i] separated that subject from the rest.
struct FeatureSetSpec {
  SelectionApproach approach = SelectionApproach::KS;
  std::vector<std::string> selected;
  std::vector<int> ks_significance;
  SelectionParams params;
  std::string combo;   // e.g. "CM"; informational
  std::string period;  // "sedentary" / "non-sedentary"; informational
};

/// Two-sample KS statistic: sup |ECDF_a - ECDF_b|. Throws EmptySample.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Asymptotic two-sample p-value from the Kolmogorov distribution with the
/// Stephens small-sample correction on the effective size.
double ks_pvalue(double d, std::size_t n1, std::size_t n2);

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(j-1) exp(-2 j^2 l^2),
/// truncated once a term drops under 1e-12.
double kolmogorov_q(double lambda);

/// One-vs-rest KS per (feature, subject). A feature survives when its p-value
/// is below alpha for at least tau of the subjects. Columns of \p features are
/// named by \p names; \p subjects labels each row. Throws NoFeatureSurvives.
FeatureSetSpec select_ks(const Eigen::MatrixXd& features,
                         const std::vector<std::string>& names,
                         const std::vector<std::string>& subjects,
                         const SelectionParams& params);

/// Sample Pearson correlation; 0 when either column is constant.
double pearson(const Eigen::Ref<const Eigen::VectorXd>& a,
               const Eigen::Ref<const Eigen::VectorXd>& b);

/// Drops redundant members of \p kept until no pair has |r| > rho. Pairs are
/// visited by descending |r|; the member with the lower KS count goes (ties:
/// the later one). Dropped features that no longer conflict are restored so
/// the result is maximal.
FeatureSetSpec prune_pearson(const Eigen::MatrixXd& features,
                             const std::vector<std::string>& names,
                             const FeatureSetSpec& kept, double rho);

/// Ranks \p kept by the spread (sample SD) of per-subject means of the
/// z-normalised feature and returns the top_k. Throws TopKExceedsAvailable.
FeatureSetSpec select_sd(const Eigen::MatrixXd& features,
                         const std::vector<std::string>& names,
                         const std::vector<std::string>& subjects,
                         const FeatureSetSpec& kept, int top_k);

/// Between-subject spread scores for each column of \p features.
Eigen::VectorXd sd_scores(const Eigen::MatrixXd& features,
                          const std::vector<std::string>& subjects);

}  // namespace wearauth
