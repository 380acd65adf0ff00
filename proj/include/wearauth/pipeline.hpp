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
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wearauth/eval.hpp"
#include "wearauth/features.hpp"
#include "wearauth/io.hpp"
#include "wearauth/records.hpp"
#include "wearauth/selection.hpp"
#include "wearauth/svm.hpp"

namespace wearauth {

inline constexpr std::string_view kVersion = "1.0.0";

struct ExperimentSpec {
  SelectionApproach approach = SelectionApproach::KS;
  BiometricCombo combo = BiometricCombo::parse("CM");
  ActivityPeriod period = ActivityPeriod::Sedentary;
  ModelKind classifier = ModelKind::Binary;
  double nu = 0.0;  // unary only; 0 means the 1/m floor

  /// e.g. "KS_CM_sedentary_binary".
  std::string name() const;
};

struct DataConfig {
  std::string source = "synth";  // "synth" or "csv"
  std::filesystem::path csv_path;
  double met_scale = 1.0;
  std::size_t synth_subjects = 20;
  std::int64_t synth_minutes = 20160;
};

struct PipelineConfig {
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "runs";
  int workers = 1;
  DataConfig data;
  SelectionParams selection;
  int sd_top_k_sedentary = 20;
  int sd_top_k_non_sedentary = 30;
  KernelSpec binary_kernel = KernelSpec::polynomial(1.0, 2);
  KernelSpec unary_kernel = KernelSpec::gaussian(1.0);
  TrainConfig train;
  SplitSpec split;
  std::size_t max_windows_per_subject = 300;
  std::vector<ExperimentSpec> experiments;
  std::vector<double> probability_grid = default_probability_grid();
  std::vector<double> nu_grid{0.0, 0.05, 0.1, 0.2, 0.3, 0.5};
  /// Subset of: features, select, train, eval, sweep-threshold,
  /// sweep-outlier, report.
  std::vector<std::string> stages{"features", "select", "train", "eval", "report"};

  bool has_stage(std::string_view stage) const;
  int sd_top_k(ActivityPeriod period) const;
};

/// Validates and fills defaults. Throws ConfigInvalid naming the field.
PipelineConfig parse_config(const Json& j);
/// Canonical echo of every field, defaults included.
Json config_to_json(const PipelineConfig& config);
/// Hash of the canonical config without output_dir and workers.
std::string config_hash(const PipelineConfig& config);

/// KS selection, followed by PC pruning or SD ranking when requested. The SD
/// count is clamped to the size of the KS set.
FeatureSetSpec select_features(const FeatureMatrix& fm, const RowsBySubject& rows,
                               SelectionApproach approach,
                               const SelectionParams& params, int sd_top_k);

struct ExperimentOptions {
  bool keep_models = false;
  bool threshold_sweep = false;  // binary only; calibrates each model
  bool outlier_sweep = false;
};

struct ExperimentResult {
  EvalReport report;
  std::vector<TrainedModel> models;  // when keep_models
  std::vector<SweepRow> threshold_sweep;    // mean over subjects
  std::optional<EerResult> probability_eer;  // mean over subjects
  std::vector<OutlierRow> outlier_sweep;    // mean over subjects
};

/// Trains and tests one model per subject (subjects with too few windows are
/// skipped and noted) and aggregates the metrics.
ExperimentResult run_experiment(const FeatureMatrix& fm, const RowsBySubject& rows,
                                const FeatureSetSpec& features,
                                const ExperimentSpec& experiment,
                                const PipelineConfig& config,
                                const ExperimentOptions& options);

struct RunResult {
  std::filesystem::path run_dir;
  std::vector<ExperimentResult> experiments;
};

/// Executes the configured stages into output_dir/run-<hash>-seed<seed>.
/// Refuses to reuse an existing run directory.
RunResult run_pipeline(const PipelineConfig& config);

/// Loads and validates data per the config (synthetic or CSV), returning
/// aligned records. \p input_hash receives an FNV-1a digest of the input.
std::vector<BiometricRecord> load_records(const PipelineConfig& config,
                                          std::string* input_hash = nullptr);

/// Runs \p task(i) for i in [0, n) on up to \p workers threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& task);

}  // namespace wearauth
