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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wearauth/features.hpp"
#include "wearauth/svm.hpp"

namespace wearauth {

inline constexpr std::size_t kMinWindowsPerSubject = 8;

struct SplitSpec {
  double train_fraction = 0.75;
  std::uint64_t seed = 0;
  bool balanced = true;
  /// Earliest windows train, latest test, instead of a seeded shuffle.
  bool chronological = false;
};

/// Row indices into a feature matrix.
struct Split {
  std::vector<Eigen::Index> train_pos, train_neg, test_pos, test_neg;
};

/// Subject -> ascending row indices. Rows of one subject are assumed to be in
/// chronological order, as produced by segment_windows.
using RowsBySubject = std::map<std::string, std::vector<Eigen::Index>>;

RowsBySubject group_rows(const std::vector<WindowRef>& rows);

/// Keeps at most \p cap rows per subject by seeded sampling (0 keeps all).
/// Surviving rows stay in ascending order.
RowsBySubject cap_windows(const RowsBySubject& rows, std::size_t cap,
                          std::uint64_t seed);

/// Positive rows of \p target split train/test; impostor rows drawn without
/// replacement, round-robin across impostor subjects, to match each positive
/// count. Throws InsufficientWindows.
Split make_split(const RowsBySubject& rows, const std::string& target,
                 const SplitSpec& spec);

struct Metrics {
  double acc = 0.0, fpr = 0.0, fnr = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

/// Accepts (predicts genuine) when score >= threshold. Throws EmptyTestSet.
Metrics evaluate_scores(std::span<const double> genuine,
                        std::span<const double> impostor, double threshold);

enum class ScoreKind { Decision, Probability };

Metrics evaluate_model(const TrainedModel& model, const Eigen::MatrixXd& x,
                       std::span<const Eigen::Index> test_pos,
                       std::span<const Eigen::Index> test_neg, double threshold,
                       ScoreKind kind = ScoreKind::Decision);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

/// Crossing of FNR and FPR over thresholds at the sorted distinct scores,
/// linearly interpolated between adjacent thresholds. Throws EmptyScores.
EerResult compute_eer(std::span<const double> genuine,
                      std::span<const double> impostor);

struct SweepRow {
  double threshold = 0.0;
  double acc = 0.0, fpr = 0.0, fnr = 0.0;
};

/// 0.00, 0.01, ..., 1.00.
std::vector<double> default_probability_grid();

std::vector<SweepRow> sweep_threshold(std::span<const double> genuine,
                                      std::span<const double> impostor,
                                      std::span<const double> grid);

/// Threshold sweep over calibrated probabilities. Throws PlattNotFitted.
std::vector<SweepRow> sweep_probability_threshold(const TrainedModel& model,
                                                  const Eigen::MatrixXd& x,
                                                  const Split& split,
                                                  std::span<const double> grid);

struct OutlierRow {
  double nu = 0.0;
  double acc = 0.0, fpr = 0.0, fnr = 0.0;
};

/// Trains one one-class model per nu on the genuine training rows and scores
/// the balanced test rows at decision threshold 0. Rows follow grid order.
std::vector<OutlierRow> sweep_outlier_fraction(const Eigen::MatrixXd& x,
                                               const Split& split,
                                               std::span<const double> nu_grid,
                                               const KernelSpec& kernel,
                                               const TrainConfig& config);

struct SubjectResult {
  std::string subject_id;
  double acc = 0.0, fpr = 0.0, fnr = 0.0;
  std::optional<EerResult> eer;
};

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;
};

struct ReportMetadata {
  std::string approach;
  std::string combo;
  std::string period;
  std::string classifier;
  std::size_t n_features = 0;
  std::size_t windows_per_subject = 0;  // |W| cap in force (0 = uncapped)
  std::vector<std::string> notes;
};

struct EvalReport {
  ReportMetadata meta;
  std::size_t n_subjects = 0;
  std::vector<SubjectResult> per_subject;
  MetricSummary acc, fpr, fnr;
  bool sd_defined = true;  // false with a single subject; sd is then 0
  std::optional<EerResult> eer;  // mean over subjects that carry one
};

/// Mean and sample SD (n-1) of each metric. Throws EmptyResults.
EvalReport aggregate_report(std::vector<SubjectResult> per_subject,
                            ReportMetadata meta);

}  // namespace wearauth
