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
// Command-line front end. Every subcommand accepts --config to seed its
// parameters from a pipeline config; explicit flags win over the file.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wearauth/pipeline.hpp"
#include "wearauth/synth.hpp"

namespace fs = std::filesystem;
using namespace wearauth;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> met_scale;
  std::optional<std::size_t> max_windows;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON pipeline config")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--met-scale", c.met_scale, "divide ingested MET values by this factor");
  app->add_option("--max-windows", c.max_windows, "per-subject window cap (0 keeps all)");
}

PipelineConfig base_config(const Common& c) {
  PipelineConfig cfg =
      c.config_path.empty() ? parse_config(Json::object()) : parse_config(read_json_file(c.config_path));
  if (c.seed) cfg.seed = *c.seed;
  cfg.split.seed = cfg.seed;
  if (c.workers) cfg.workers = *c.workers;
  if (c.met_scale) {
    if (!(*c.met_scale > 0.0)) throw Error(Errc::ConfigInvalid, "--met-scale must be > 0");
    cfg.data.met_scale = *c.met_scale;
  }
  if (c.max_windows) cfg.max_windows_per_subject = *c.max_windows;
  return cfg;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

std::vector<BiometricRecord> read_records(const std::string& path, double met_scale) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "'");
  return parse_records(in, {met_scale});
}

FeatureMatrix load_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "'");
  return read_feature_matrix(in);
}

struct ModelArgs {
  std::string features, featureset, classifier = "binary";
  double nu = 0.0;
};

void add_model_args(CLI::App* app, ModelArgs& m) {
  app->add_option("--features", m.features, "feature matrix CSV")->required();
  app->add_option("--featureset", m.featureset, "feature set JSON")->required();
  app->add_option("--classifier", m.classifier, "binary or unary")
      ->check(CLI::IsMember({"binary", "unary"}));
  app->add_option("--nu", m.nu, "one-class nu (0 = 1/m floor)")->check(CLI::Range(0.0, 1.0));
}

struct Prepared {
  FeatureMatrix fm;
  RowsBySubject rows;
  FeatureSetSpec spec;
  ExperimentSpec experiment;
};

Prepared prepare(const ModelArgs& m, const PipelineConfig& cfg) {
  Prepared p;
  p.fm = load_features(m.features);
  p.rows = cap_windows(group_rows(p.fm.rows), cfg.max_windows_per_subject, cfg.seed);
  p.spec = feature_set_from_json(read_json_file(m.featureset));
  p.experiment.approach = p.spec.approach;
  if (!p.spec.combo.empty()) p.experiment.combo = BiometricCombo::parse(p.spec.combo);
  if (const auto period = parse_activity_period(p.spec.period)) p.experiment.period = *period;
  p.experiment.classifier = m.classifier == "unary" ? ModelKind::Unary : ModelKind::Binary;
  p.experiment.nu = m.nu;
  return p;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Implicit authentication from wearable biometrics"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic minute-level dataset");
  std::size_t n_subjects = 20;
  std::int64_t minutes = 20160;
  std::string synth_out, profiles_out;
  synth->add_option("--subjects", n_subjects, "number of subjects")->check(CLI::PositiveNumber);
  synth->add_option("--minutes", minutes, "minutes per subject")->check(CLI::PositiveNumber);
  synth->add_option("-o,--out", synth_out, "records CSV (default stdout)");
  synth->add_option("--profiles", profiles_out, "profiles JSON sidecar");
  add_common(synth, common);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate a records CSV and report alignment");
  std::string input, ingest_out, clean_out;
  ingest->add_option("-i,--input", input, "records CSV")->required();
  ingest->add_option("-o,--out", ingest_out, "summary JSON (default stdout)");
  ingest->add_option("--clean", clean_out, "write the aligned records here");
  add_common(ingest, common);

  // features
  auto* features = app.add_subcommand("features", "window records and extract features");
  std::string combo = "CM", period = "sedentary", features_out;
  features->add_option("-i,--input", input, "records CSV")->required();
  features->add_option("--combo", combo, "biometric combination, e.g. CM");
  features->add_option("--period", period, "sedentary or non-sedentary")
      ->check(CLI::IsMember({"sedentary", "non-sedentary"}));
  features->add_option("-o,--out", features_out, "feature matrix CSV (default stdout)");
  add_common(features, common);

  // select
  auto* select = app.add_subcommand("select", "choose features by KS, PC or SD");
  std::string approach = "KS", select_out;
  std::optional<double> alpha, tau, rho;
  std::optional<int> top_k;
  std::string select_features_path;
  select->add_option("--features", select_features_path, "feature matrix CSV")->required();
  select->add_option("--approach", approach, "KS, PC or SD")
      ->check(CLI::IsMember({"KS", "PC", "SD"}));
  select->add_option("--alpha", alpha, "KS significance level");
  select->add_option("--tau", tau, "required fraction of significant subjects");
  select->add_option("--rho", rho, "Pearson redundancy threshold");
  select->add_option("--top-k", top_k, "SD feature count");
  select->add_option("-o,--out", select_out, "feature set JSON (default stdout)");
  add_common(select, common);

  // train
  auto* train = app.add_subcommand("train", "train one model per subject");
  ModelArgs train_args;
  std::string models_dir;
  add_model_args(train, train_args);
  train->add_option("--out-dir", models_dir, "directory for model JSON files")->required();
  add_common(train, common);

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate per-subject models");
  ModelArgs eval_args;
  std::string eval_models, eval_out, eval_csv;
  add_model_args(eval, eval_args);
  eval->add_option("--models", eval_models, "evaluate persisted models instead of retraining");
  eval->add_option("-o,--out", eval_out, "report JSON (default stdout)");
  eval->add_option("--csv", eval_csv, "report CSV");
  add_common(eval, common);

  // sweep-threshold
  auto* sweep_t = app.add_subcommand("sweep-threshold", "probability threshold sweep");
  ModelArgs sweep_t_args;
  std::string sweep_t_out, sweep_t_eer;
  add_model_args(sweep_t, sweep_t_args);
  sweep_t->add_option("-o,--out", sweep_t_out, "sweep CSV (default stdout)");
  sweep_t->add_option("--eer", sweep_t_eer, "EER JSON");
  add_common(sweep_t, common);

  // sweep-outlier
  auto* sweep_o = app.add_subcommand("sweep-outlier", "one-class nu sweep");
  ModelArgs sweep_o_args;
  std::string sweep_o_out;
  add_model_args(sweep_o, sweep_o_args);
  sweep_o->add_option("-o,--out", sweep_o_out, "sweep CSV (default stdout)");
  add_common(sweep_o, common);

  // report
  auto* report = app.add_subcommand("report", "summarise report JSON files as a table");
  std::vector<std::string> report_inputs;
  std::string report_out;
  report->add_option("inputs", report_inputs, "report JSON files")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--out", report_out, "summary CSV (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "execute the configured pipeline");
  std::string run_output, run_input;
  run->add_option("--output-dir", run_output, "parent of the run directory");
  run->add_option("-i,--input", run_input, "records CSV (switches the source to csv)");
  add_common(run, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (synth->parsed()) {
    const auto cfg = base_config(common);
    const auto ds = generate_dataset(n_subjects, minutes, cfg.seed);
    std::ostringstream ss;
    write_records(ss, ds.records);
    write_or_print(synth_out, ss.str());
    if (!profiles_out.empty()) write_json_file(profiles_out, to_json(ds.profiles));
    return 0;
  }

  if (ingest->parsed()) {
    const auto cfg = base_config(common);
    const auto records = read_records(input, cfg.data.met_scale);
    const auto aligned = filter_aligned(records);
    Json summary{{"records", records.size()},
                 {"aligned", aligned.records.size()},
                 {"dropped", aligned.dropped}};
    for (auto p : {ActivityPeriod::Sedentary, ActivityPeriod::NonSedentary}) {
      std::map<std::string, std::size_t> per_subject;
      for (const auto& w : segment_windows(aligned.records, p)) ++per_subject[w.subject_id];
      summary["windows"][std::string(to_string(p))] = per_subject;
    }
    write_or_print(ingest_out, summary.dump(2) + "\n");
    if (!clean_out.empty()) {
      std::ostringstream ss;
      write_records(ss, aligned.records);
      write_text_file(clean_out, ss.str());
    }
    return 0;
  }

  if (features->parsed()) {
    const auto cfg = base_config(common);
    const auto p = parse_activity_period(period);
    const auto records = filter_aligned(read_records(input, cfg.data.met_scale)).records;
    const auto windows = segment_windows(records, *p);
    const auto fm = build_feature_matrix(windows, BiometricCombo::parse(combo),
                                         *p == ActivityPeriod::NonSedentary);
    std::ostringstream ss;
    write_feature_matrix(ss, fm);
    write_or_print(features_out, ss.str());
    return 0;
  }

  if (select->parsed()) {
    auto cfg = base_config(common);
    if (alpha) cfg.selection.alpha = *alpha;
    if (tau) cfg.selection.tau = *tau;
    if (rho) cfg.selection.rho = *rho;
    const auto fm = load_features(select_features_path);
    const auto rows = cap_windows(group_rows(fm.rows), cfg.max_windows_per_subject, cfg.seed);
    const bool non_sedentary =
        !fm.rows.empty() && fm.rows.front().level != ActivityLevel::Sedentary;
    const auto p = non_sedentary ? ActivityPeriod::NonSedentary : ActivityPeriod::Sedentary;
    const int k = top_k ? *top_k : cfg.sd_top_k(p);
    auto spec = select_features(fm, rows, parse_selection_approach(approach),
                                cfg.selection, k);
    spec.period = std::string(to_string(p));
    // Recover the combination from the feature-name prefixes.
    std::string letters;
    for (const auto& name : fm.names)
      if (name.size() > 2 && name[1] == '_' && letters.find(name[0]) == std::string::npos)
        letters += name[0];
    spec.combo = BiometricCombo::parse(letters).name();
    write_or_print(select_out, to_json(spec).dump(2) + "\n");
    return 0;
  }

  if (train->parsed() || eval->parsed() || sweep_t->parsed() || sweep_o->parsed()) {
    auto cfg = base_config(common);
    const ModelArgs& args = train->parsed()     ? train_args
                             : eval->parsed()    ? eval_args
                             : sweep_t->parsed() ? sweep_t_args
                                                 : sweep_o_args;
    const auto prep = prepare(args, cfg);
    ExperimentOptions opts;
    opts.keep_models = train->parsed();
    opts.threshold_sweep = sweep_t->parsed();
    opts.outlier_sweep = sweep_o->parsed();
    if (opts.threshold_sweep && prep.experiment.classifier != ModelKind::Binary)
      throw Error(Errc::InvalidArgument, "threshold sweep needs a binary classifier");

    if (eval->parsed() && !eval_models.empty()) {
      const auto cols = prep.fm.columns(prep.spec.selected);
      const Eigen::MatrixXd x = prep.fm.values(Eigen::all, cols);
      std::vector<SubjectResult> per_subject;
      ReportMetadata meta;
      meta.approach = to_string(prep.spec.approach);
      meta.combo = prep.experiment.combo.name();
      meta.period = std::string(to_string(prep.experiment.period));
      meta.classifier = args.classifier;
      meta.n_features = prep.spec.selected.size();
      meta.windows_per_subject = cfg.max_windows_per_subject;
      for (const auto& [subject, idx] : prep.rows) {
        const auto path = fs::path(eval_models) / (subject + ".json");
        if (idx.size() < kMinWindowsPerSubject || !fs::exists(path)) {
          meta.notes.push_back("skipped " + subject);
          continue;
        }
        const auto model = load_model(path);
        const auto split = make_split(prep.rows, subject, cfg.split);
        std::vector<double> g, imp;
        for (auto r : split.test_pos) g.push_back(decision_value(model, x.row(r).transpose()));
        for (auto r : split.test_neg) imp.push_back(decision_value(model, x.row(r).transpose()));
        const auto m = evaluate_scores(g, imp, 0.0);
        per_subject.push_back({subject, m.acc, m.fpr, m.fnr, compute_eer(g, imp)});
      }
      const auto rep = aggregate_report(std::move(per_subject), std::move(meta));
      write_or_print(eval_out, to_json(rep).dump(2) + "\n");
      if (!eval_csv.empty()) {
        std::ostringstream ss;
        write_report_csv(ss, rep);
        write_text_file(eval_csv, ss.str());
      }
      return 0;
    }

    const auto result =
        run_experiment(prep.fm, prep.rows, prep.spec, prep.experiment, cfg, opts);
    if (train->parsed()) {
      fs::create_directories(models_dir);
      for (const auto& m : result.models)
        persist_model(fs::path(models_dir) / (m.subject_id + ".json"), m);
      std::cout << "wrote " << result.models.size() << " models to " << models_dir << "\n";
    } else if (eval->parsed()) {
      write_or_print(eval_out, to_json(result.report).dump(2) + "\n");
      if (!eval_csv.empty()) {
        std::ostringstream ss;
        write_report_csv(ss, result.report);
        write_text_file(eval_csv, ss.str());
      }
    } else if (sweep_t->parsed()) {
      std::ostringstream ss;
      write_sweep_csv(ss, result.threshold_sweep);
      write_or_print(sweep_t_out, ss.str());
      if (!sweep_t_eer.empty())
        write_json_file(sweep_t_eer, Json{{"rate", result.probability_eer->eer},
                                          {"threshold", result.probability_eer->threshold}});
    } else {
      std::ostringstream ss;
      write_outlier_csv(ss, result.outlier_sweep);
      write_or_print(sweep_o_out, ss.str());
    }
    return 0;
  }

  if (report->parsed()) {
    std::ostringstream ss;
    ss << "approach,combo,period,classifier,n,N,W,mu_ACC,sd_ACC,mu_FNR,sd_FNR,mu_FPR,sd_FPR\n";
    for (const auto& path : report_inputs) {
      const auto r = report_from_json(read_json_file(path));
      ss << r.meta.approach << ',' << r.meta.combo << ',' << r.meta.period << ','
         << r.meta.classifier << ',' << r.meta.n_features << ',' << r.n_subjects << ','
         << r.meta.windows_per_subject << ',' << format_double(r.acc.mean) << ','
         << format_double(r.acc.sd) << ',' << format_double(r.fnr.mean) << ','
         << format_double(r.fnr.sd) << ',' << format_double(r.fpr.mean) << ','
         << format_double(r.fpr.sd) << '\n';
    }
    write_or_print(report_out, ss.str());
    return 0;
  }

  // run
  auto cfg = base_config(common);
  if (!run_output.empty()) cfg.output_dir = run_output;
  if (!run_input.empty()) {
    cfg.data.source = "csv";
    cfg.data.csv_path = run_input;
  }
  const auto result = run_pipeline(cfg);
  std::cout << result.run_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const StageFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.cause());
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
