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
#include "wearauth/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "wearauth/rng.hpp"
#include "wearauth/synth.hpp"

namespace wearauth {

namespace fs = std::filesystem;

std::string ExperimentSpec::name() const {
  std::string period_name(to_string(period));
  return to_string(approach) + "_" + combo.name() + "_" + period_name + "_" +
         (classifier == ModelKind::Binary ? "binary" : "unary");
}

bool PipelineConfig::has_stage(std::string_view stage) const {
  return std::find(stages.begin(), stages.end(), stage) != stages.end();
}

int PipelineConfig::sd_top_k(ActivityPeriod period) const {
  return period == ActivityPeriod::Sedentary ? sd_top_k_sedentary
                                             : sd_top_k_non_sedentary;
}

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(Errc::ConfigInvalid, "config field '" + field + "': " + why);
}

/// Reads an optional field, converting type errors into ConfigInvalid.
template <typename T>
void read_field(const Json& obj, const char* key, const std::string& path, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const Json::exception&) {
    invalid(path + key, "has the wrong type");
  }
}

void reject_unknown(const Json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) invalid(path.empty() ? "<root>" : path, "must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }))
      invalid(path + key, "unknown field");
  }
}

const std::set<std::string> kStages{"features", "select", "train", "eval",
                                    "sweep-threshold", "sweep-outlier", "report"};

ExperimentSpec parse_experiment(const Json& j, const std::string& path) {
  reject_unknown(j, path, {"approach", "combo", "period", "classifier", "nu"});
  ExperimentSpec e;
  std::string approach = "KS", combo = "CM", period = "sedentary", classifier = "binary";
  read_field(j, "approach", path, approach);
  read_field(j, "combo", path, combo);
  read_field(j, "period", path, period);
  read_field(j, "classifier", path, classifier);
  read_field(j, "nu", path, e.nu);
  try {
    e.approach = parse_selection_approach(approach);
  } catch (const Error&) {
    invalid(path + "approach", "must be KS, PC or SD");
  }
  try {
    e.combo = BiometricCombo::parse(combo);
  } catch (const Error& err) {
    invalid(path + "combo", err.what());
  }
  const auto p = parse_activity_period(period);
  if (!p) invalid(path + "period", "must be sedentary or non-sedentary");
  e.period = *p;
  if (classifier == "binary") e.classifier = ModelKind::Binary;
  else if (classifier == "unary") e.classifier = ModelKind::Unary;
  else invalid(path + "classifier", "must be binary or unary");
  if (!(e.nu >= 0.0 && e.nu <= 1.0)) invalid(path + "nu", "must lie in [0, 1]");
  return e;
}

Json experiment_json(const ExperimentSpec& e) {
  return {{"approach", to_string(e.approach)},
          {"combo", e.combo.name()},
          {"period", std::string(to_string(e.period))},
          {"classifier", e.classifier == ModelKind::Binary ? "binary" : "unary"},
          {"nu", e.nu}};
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <typename Fn>
auto in_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageFailure&) {
    throw;
  } catch (const Error& e) {
    throw StageFailure(stage, e.code(), e.what());
  }
}

}  // namespace

PipelineConfig parse_config(const Json& j) {
  reject_unknown(j, "", {"seed", "output_dir", "workers", "data", "selection", "svm",
                         "split", "experiments", "sweeps", "stages"});
  PipelineConfig c;
  read_field(j, "seed", "", c.seed);
  std::string out_dir = c.output_dir.string();
  read_field(j, "output_dir", "", out_dir);
  c.output_dir = out_dir;
  read_field(j, "workers", "", c.workers);
  if (c.workers < 1) invalid("workers", "must be >= 1");

  if (j.contains("data")) {
    const auto& d = j.at("data");
    reject_unknown(d, "data.", {"source", "csv_path", "met_scale", "subjects", "minutes"});
    read_field(d, "source", "data.", c.data.source);
    std::string csv = c.data.csv_path.string();
    read_field(d, "csv_path", "data.", csv);
    c.data.csv_path = csv;
    read_field(d, "met_scale", "data.", c.data.met_scale);
    read_field(d, "subjects", "data.", c.data.synth_subjects);
    read_field(d, "minutes", "data.", c.data.synth_minutes);
  }
  if (c.data.source != "synth" && c.data.source != "csv")
    invalid("data.source", "must be synth or csv");
  if (c.data.source == "csv" && c.data.csv_path.empty())
    invalid("data.csv_path", "required when data.source is csv");
  if (!(c.data.met_scale > 0.0)) invalid("data.met_scale", "must be > 0");
  if (c.data.synth_subjects < 2) invalid("data.subjects", "must be >= 2");
  if (c.data.synth_minutes < 1) invalid("data.minutes", "must be >= 1");

  if (j.contains("selection")) {
    const auto& s = j.at("selection");
    reject_unknown(s, "selection.", {"alpha", "tau", "rho", "sd_top_k"});
    read_field(s, "alpha", "selection.", c.selection.alpha);
    read_field(s, "tau", "selection.", c.selection.tau);
    read_field(s, "rho", "selection.", c.selection.rho);
    if (s.contains("sd_top_k")) {
      const auto& k = s.at("sd_top_k");
      reject_unknown(k, "selection.sd_top_k.", {"sedentary", "non-sedentary"});
      read_field(k, "sedentary", "selection.sd_top_k.", c.sd_top_k_sedentary);
      read_field(k, "non-sedentary", "selection.sd_top_k.", c.sd_top_k_non_sedentary);
    }
  }
  if (!(c.selection.alpha > 0.0 && c.selection.alpha < 1.0))
    invalid("selection.alpha", "must lie in (0, 1)");
  if (!(c.selection.tau > 0.0 && c.selection.tau <= 1.0))
    invalid("selection.tau", "must lie in (0, 1]");
  if (!(c.selection.rho > 0.0 && c.selection.rho < 1.0))
    invalid("selection.rho", "must lie in (0, 1)");
  if (c.sd_top_k_sedentary < 1 || c.sd_top_k_non_sedentary < 1)
    invalid("selection.sd_top_k", "must be >= 1");

  if (j.contains("svm")) {
    const auto& s = j.at("svm");
    reject_unknown(s, "svm.", {"C", "gamma", "degree", "rbf_gamma", "tol", "max_passes",
                               "normalize"});
    read_field(s, "C", "svm.", c.train.C);
    read_field(s, "gamma", "svm.", c.binary_kernel.gamma);
    read_field(s, "degree", "svm.", c.binary_kernel.degree);
    read_field(s, "rbf_gamma", "svm.", c.unary_kernel.gamma);
    read_field(s, "tol", "svm.", c.train.tol);
    read_field(s, "max_passes", "svm.", c.train.max_passes);
    read_field(s, "normalize", "svm.", c.train.normalize);
  }
  if (!(c.train.C > 0.0)) invalid("svm.C", "must be > 0");
  if (!(c.binary_kernel.gamma > 0.0)) invalid("svm.gamma", "must be > 0");
  if (c.binary_kernel.degree < 1) invalid("svm.degree", "must be >= 1");
  if (!(c.unary_kernel.gamma > 0.0)) invalid("svm.rbf_gamma", "must be > 0");
  if (!(c.train.tol > 0.0)) invalid("svm.tol", "must be > 0");
  if (c.train.max_passes < 1) invalid("svm.max_passes", "must be >= 1");

  if (j.contains("split")) {
    const auto& s = j.at("split");
    reject_unknown(s, "split.", {"train_fraction", "balanced", "chronological",
                                 "max_windows_per_subject"});
    read_field(s, "train_fraction", "split.", c.split.train_fraction);
    read_field(s, "balanced", "split.", c.split.balanced);
    read_field(s, "chronological", "split.", c.split.chronological);
    read_field(s, "max_windows_per_subject", "split.", c.max_windows_per_subject);
  }
  if (!(c.split.train_fraction > 0.0 && c.split.train_fraction < 1.0))
    invalid("split.train_fraction", "must lie in (0, 1)");
  c.split.seed = c.seed;

  if (j.contains("experiments")) {
    const auto& e = j.at("experiments");
    if (!e.is_array() || e.empty()) invalid("experiments", "must be a non-empty array");
    for (std::size_t i = 0; i < e.size(); ++i)
      c.experiments.push_back(
          parse_experiment(e.at(i), "experiments[" + std::to_string(i) + "]."));
  } else {
    c.experiments.push_back(ExperimentSpec{});
  }

  if (j.contains("sweeps")) {
    const auto& s = j.at("sweeps");
    reject_unknown(s, "sweeps.", {"probability_grid_step", "nu_grid"});
    if (s.contains("probability_grid_step")) {
      double step = 0.01;
      read_field(s, "probability_grid_step", "sweeps.", step);
      if (!(step > 0.0 && step <= 1.0))
        invalid("sweeps.probability_grid_step", "must lie in (0, 1]");
      c.probability_grid.clear();
      const auto n = static_cast<int>(std::floor(1.0 / step + 1e-9));
      for (int i = 0; i <= n; ++i) c.probability_grid.push_back(i * step);
    }
    read_field(s, "nu_grid", "sweeps.", c.nu_grid);
    if (c.nu_grid.empty()) invalid("sweeps.nu_grid", "must not be empty");
    for (double nu : c.nu_grid)
      if (!(nu >= 0.0 && nu <= 1.0)) invalid("sweeps.nu_grid", "values must lie in [0, 1]");
  }

  if (j.contains("stages")) {
    read_field(j, "stages", "", c.stages);
    for (const auto& s : c.stages)
      if (!kStages.count(s)) invalid("stages", "unknown stage '" + s + "'");
  }
  return c;
}

Json config_to_json(const PipelineConfig& c) {
  Json experiments = Json::array();
  for (const auto& e : c.experiments) experiments.push_back(experiment_json(e));
  return {{"seed", c.seed},
          {"output_dir", c.output_dir.string()},
          {"workers", c.workers},
          {"data",
           {{"source", c.data.source},
            {"csv_path", c.data.csv_path.string()},
            {"met_scale", c.data.met_scale},
            {"subjects", c.data.synth_subjects},
            {"minutes", c.data.synth_minutes}}},
          {"selection",
           {{"alpha", c.selection.alpha},
            {"tau", c.selection.tau},
            {"rho", c.selection.rho},
            {"sd_top_k",
             {{"sedentary", c.sd_top_k_sedentary},
              {"non-sedentary", c.sd_top_k_non_sedentary}}}}},
          {"svm",
           {{"C", c.train.C},
            {"gamma", c.binary_kernel.gamma},
            {"degree", c.binary_kernel.degree},
            {"rbf_gamma", c.unary_kernel.gamma},
            {"tol", c.train.tol},
            {"max_passes", c.train.max_passes},
            {"normalize", c.train.normalize}}},
          {"split",
           {{"train_fraction", c.split.train_fraction},
            {"balanced", c.split.balanced},
            {"chronological", c.split.chronological},
            {"max_windows_per_subject", c.max_windows_per_subject}}},
          {"experiments", experiments},
          {"sweeps",
           {{"probability_grid_step",
             c.probability_grid.size() > 1 ? c.probability_grid[1] - c.probability_grid[0]
                                           : 1.0},
            {"nu_grid", c.nu_grid}}},
          {"stages", c.stages}};
}

std::string config_hash(const PipelineConfig& config) {
  auto j = config_to_json(config);
  j.erase("output_dir");
  j.erase("workers");
  return hex64(fnv1a64(j.dump()));
}

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(n);
  const auto run = [&](std::size_t i) {
    try {
      task(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  // Lowest index wins so the reported failure does not depend on scheduling.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

FeatureSetSpec select_features(const FeatureMatrix& fm, const RowsBySubject& rows,
                               SelectionApproach approach,
                               const SelectionParams& params, int sd_top_k) {
  std::vector<Eigen::Index> used;
  std::vector<std::string> subjects;
  for (const auto& [subject, idx] : rows) {
    for (auto r : idx) {
      used.push_back(r);
      subjects.push_back(subject);
    }
  }
  const Eigen::MatrixXd x = fm.values(used, Eigen::all);
  auto spec = select_ks(x, fm.names, subjects, params);
  if (approach == SelectionApproach::PC) {
    spec = prune_pearson(x, fm.names, spec, params.rho);
  } else if (approach == SelectionApproach::SD) {
    const int k = std::min<int>(sd_top_k, static_cast<int>(spec.selected.size()));
    spec = select_sd(x, fm.names, subjects, spec, k);
  }
  return spec;
}

ExperimentResult run_experiment(const FeatureMatrix& fm, const RowsBySubject& rows,
                                const FeatureSetSpec& features,
                                const ExperimentSpec& experiment,
                                const PipelineConfig& config,
                                const ExperimentOptions& options) {
  const auto cols = fm.columns(features.selected);
  const Eigen::MatrixXd x = fm.values(Eigen::all, cols);

  ReportMetadata meta;
  meta.approach = to_string(experiment.approach);
  meta.combo = experiment.combo.name();
  meta.period = std::string(to_string(experiment.period));
  meta.classifier = experiment.classifier == ModelKind::Binary ? "binary" : "unary";
  meta.n_features = features.selected.size();
  meta.windows_per_subject = config.max_windows_per_subject;

  std::vector<std::string> subjects;
  for (const auto& [subject, idx] : rows) {
    if (idx.size() < kMinWindowsPerSubject) {
      meta.notes.push_back("skipped " + subject + ": " + std::to_string(idx.size()) +
                           " windows");
    } else {
      subjects.push_back(subject);
    }
  }

  struct Output {
    SubjectResult result;
    TrainedModel model;
    std::vector<SweepRow> sweep;
    std::optional<EerResult> probability_eer;
    std::vector<OutlierRow> outlier;
  };
  std::vector<Output> outputs(subjects.size());
  SplitSpec split_spec = config.split;
  split_spec.seed = config.seed;

  parallel_for(subjects.size(), config.workers, [&](std::size_t k) {
    const auto& subject = subjects[k];
    auto& out = outputs[k];
    const auto split = make_split(rows, subject, split_spec);
    TrainConfig tc = config.train;
    tc.seed = derive_seed(config.seed, fnv1a64(subject));

    if (experiment.classifier == ModelKind::Binary) {
      std::vector<Eigen::Index> train_rows = split.train_pos;
      train_rows.insert(train_rows.end(), split.train_neg.begin(), split.train_neg.end());
      Eigen::VectorXd y(static_cast<Eigen::Index>(train_rows.size()));
      y.head(static_cast<Eigen::Index>(split.train_pos.size())).setOnes();
      y.tail(static_cast<Eigen::Index>(split.train_neg.size())).setConstant(-1.0);
      tc.calibrate = options.threshold_sweep;
      out.model = train_binary(x(train_rows, Eigen::all), y, config.binary_kernel, tc);
    } else {
      tc.nu = experiment.nu;
      out.model = train_unary(x(split.train_pos, Eigen::all), config.unary_kernel, tc);
    }
    out.model.subject_id = subject;
    out.model.features = features.selected;

    std::vector<double> g, imp;
    for (auto r : split.test_pos) g.push_back(decision_value(out.model, x.row(r).transpose()));
    for (auto r : split.test_neg) imp.push_back(decision_value(out.model, x.row(r).transpose()));
    const auto m = evaluate_scores(g, imp, 0.0);
    out.result = {subject, m.acc, m.fpr, m.fnr, compute_eer(g, imp)};

    if (options.threshold_sweep && experiment.classifier == ModelKind::Binary) {
      out.sweep = sweep_probability_threshold(out.model, x, split, config.probability_grid);
      std::vector<double> pg, pi;
      for (double v : g) pg.push_back(platt_probability(*out.model.platt, v));
      for (double v : imp) pi.push_back(platt_probability(*out.model.platt, v));
      out.probability_eer = compute_eer(pg, pi);
    }
    if (options.outlier_sweep) {
      out.outlier =
          sweep_outlier_fraction(x, split, config.nu_grid, config.unary_kernel, tc);
    }
  });

  ExperimentResult result;
  std::vector<SubjectResult> per_subject;
  for (auto& o : outputs) per_subject.push_back(o.result);
  if (per_subject.empty())
    throw Error(Errc::EmptyResults, "no subject has enough windows for " + experiment.name());
  result.report = aggregate_report(std::move(per_subject), std::move(meta));

  const auto n = static_cast<double>(outputs.size());
  if (!outputs.empty() && !outputs.front().sweep.empty()) {
    result.threshold_sweep.assign(outputs.front().sweep.size(), SweepRow{});
    EerResult eer{};
    for (const auto& o : outputs) {
      for (std::size_t i = 0; i < o.sweep.size(); ++i) {
        auto& row = result.threshold_sweep[i];
        row.threshold = o.sweep[i].threshold;
        row.acc += o.sweep[i].acc / n;
        row.fpr += o.sweep[i].fpr / n;
        row.fnr += o.sweep[i].fnr / n;
      }
      eer.eer += o.probability_eer->eer / n;
      eer.threshold += o.probability_eer->threshold / n;
    }
    result.probability_eer = eer;
  }
  if (!outputs.empty() && !outputs.front().outlier.empty()) {
    result.outlier_sweep.assign(outputs.front().outlier.size(), OutlierRow{});
    for (const auto& o : outputs) {
      for (std::size_t i = 0; i < o.outlier.size(); ++i) {
        auto& row = result.outlier_sweep[i];
        row.nu = o.outlier[i].nu;
        row.acc += o.outlier[i].acc / n;
        row.fpr += o.outlier[i].fpr / n;
        row.fnr += o.outlier[i].fnr / n;
      }
    }
  }
  if (options.keep_models)
    for (auto& o : outputs) result.models.push_back(std::move(o.model));
  return result;
}

std::vector<BiometricRecord> load_records(const PipelineConfig& config,
                                          std::string* input_hash) {
  std::string text;
  if (config.data.source == "synth") {
    const auto ds = generate_dataset(config.data.synth_subjects, config.data.synth_minutes,
                                     config.seed);
    std::ostringstream ss;
    write_records(ss, ds.records);
    text = ss.str();
  } else {
    text = read_text_file(config.data.csv_path);
  }
  if (input_hash) *input_hash = hex64(fnv1a64(text));
  std::istringstream in(text);
  return parse_records(in, {config.data.met_scale});
}

RunResult run_pipeline(const PipelineConfig& config) {
  RunResult run;
  const auto hash = config_hash(config);
  run.run_dir = config.output_dir / ("run-" + hash + "-seed" + std::to_string(config.seed));
  if (fs::exists(run.run_dir))
    throw Error(Errc::InvalidArgument,
                "run directory '" + run.run_dir.string() + "' already exists; refusing to overwrite");
  fs::create_directories(run.run_dir);
  std::vector<std::string> artifacts;
  const auto emit = [&](const std::string& name, const std::string& text) {
    write_text_file(run.run_dir / name, text);
    artifacts.push_back(name);
  };

  std::string input_hash;
  std::vector<BiometricRecord> records = in_stage("ingest", [&] {
    if (config.data.source == "synth") {
      const auto ds = generate_dataset(config.data.synth_subjects,
                                       config.data.synth_minutes, config.seed);
      std::ostringstream ss;
      write_records(ss, ds.records);
      emit("data.csv", ss.str());
      emit("profiles.json", to_json(ds.profiles).dump(2) + "\n");
    }
    return load_records(config, &input_hash);
  });

  const auto aligned = filter_aligned(records);
  std::map<ActivityPeriod, std::vector<Window>> windows;
  for (const auto& e : config.experiments) {
    if (!windows.count(e.period))
      windows[e.period] = in_stage("ingest", [&] { return segment_windows(aligned.records, e.period); });
  }
  {
    Json ingest{{"records", records.size()},
                {"aligned", aligned.records.size()},
                {"dropped", aligned.dropped}};
    for (const auto& [period, w] : windows) {
      std::map<std::string, std::size_t> per_subject;
      for (const auto& win : w) ++per_subject[win.subject_id];
      ingest["windows"][std::string(to_string(period))] = per_subject;
    }
    emit("ingest.json", ingest.dump(2) + "\n");
  }

  std::map<std::pair<std::string, ActivityPeriod>, FeatureMatrix> matrices;
  std::ostringstream summary;
  summary << "experiment,approach,combo,period,classifier,n,N,W,mu_ACC,sd_ACC,"
             "mu_FNR,sd_FNR,mu_FPR,sd_FPR\n";

  for (const auto& e : config.experiments) {
    const auto key = std::make_pair(e.combo.name(), e.period);
    if (!matrices.count(key)) {
      matrices[key] = in_stage("features", [&] {
        return build_feature_matrix(windows.at(e.period), e.combo,
                                    e.period == ActivityPeriod::NonSedentary);
      });
      if (config.has_stage("features")) {
        std::ostringstream ss;
        write_feature_matrix(ss, matrices[key]);
        emit("features_" + e.combo.name() + "_" + std::string(to_string(e.period)) + ".csv",
             ss.str());
      }
    }
    const auto& fm = matrices.at(key);
    const auto rows = cap_windows(group_rows(fm.rows), config.max_windows_per_subject,
                                  config.seed);

    auto spec = in_stage("select", [&] {
      return select_features(fm, rows, e.approach, config.selection,
                             config.sd_top_k(e.period));
    });
    spec.combo = e.combo.name();
    spec.period = std::string(to_string(e.period));
    const auto name = e.name();
    if (config.has_stage("select"))
      emit("featureset_" + name + ".json", to_json(spec).dump(2) + "\n");

    const bool needs_models = config.has_stage("train") || config.has_stage("eval") ||
                              config.has_stage("sweep-threshold") ||
                              config.has_stage("sweep-outlier") || config.has_stage("report");
    if (!needs_models) continue;
    ExperimentOptions opts;
    opts.keep_models = config.has_stage("train");
    opts.threshold_sweep =
        config.has_stage("sweep-threshold") && e.classifier == ModelKind::Binary;
    opts.outlier_sweep = config.has_stage("sweep-outlier");
    auto result = in_stage("train", [&] {
      return run_experiment(fm, rows, spec, e, config, opts);
    });

    if (opts.keep_models) {
      fs::create_directories(run.run_dir / "models" / name);
      for (const auto& m : result.models) {
        const auto rel = "models/" + name + "/" + m.subject_id + ".json";
        emit(rel, to_json(m).dump(2) + "\n");
      }
    }
    if (config.has_stage("eval")) {
      emit("report_" + name + ".json", to_json(result.report).dump(2) + "\n");
      std::ostringstream ss;
      write_report_csv(ss, result.report);
      emit("report_" + name + ".csv", ss.str());
    }
    if (opts.threshold_sweep) {
      std::ostringstream ss;
      write_sweep_csv(ss, result.threshold_sweep);
      emit("sweep_threshold_" + name + ".csv", ss.str());
      Json eer{{"rate", result.probability_eer->eer},
               {"threshold", result.probability_eer->threshold}};
      emit("sweep_threshold_" + name + "_eer.json", eer.dump(2) + "\n");
    }
    if (opts.outlier_sweep) {
      std::ostringstream ss;
      write_outlier_csv(ss, result.outlier_sweep);
      emit("sweep_outlier_" + name + ".csv", ss.str());
    }
    const auto& r = result.report;
    summary << name << ',' << r.meta.approach << ',' << r.meta.combo << ','
            << r.meta.period << ',' << r.meta.classifier << ',' << r.meta.n_features
            << ',' << r.n_subjects << ',' << r.meta.windows_per_subject << ','
            << format_double(r.acc.mean) << ',' << format_double(r.acc.sd) << ','
            << format_double(r.fnr.mean) << ',' << format_double(r.fnr.sd) << ','
            << format_double(r.fpr.mean) << ',' << format_double(r.fpr.sd) << '\n';
    run.experiments.push_back(std::move(result));
  }
  if (config.has_stage("report")) emit("summary.csv", summary.str());

  std::sort(artifacts.begin(), artifacts.end());
  Json manifest{{"version", std::string(kVersion)},
                {"created_at", utc_timestamp()},
                {"config", config_to_json(config)},
                {"config_hash", hash},
                {"seed", config.seed},
                {"input_hash", input_hash},
                {"artifacts", artifacts}};
  write_json_file(run.run_dir / "manifest.json", manifest);
  return run;
}

}  // namespace wearauth
