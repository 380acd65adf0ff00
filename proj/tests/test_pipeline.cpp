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
#include <filesystem>

#include "doctest.h"
#include "wearauth/pipeline.hpp"
#include "wearauth/synth.hpp"

using namespace wearauth;
namespace fs = std::filesystem;

namespace {

Json minimal(const std::string& out) {
  Json j = Json::parse(R"({
    "seed": 7,
    "data": {"source": "synth", "subjects": 10, "minutes": 4000},
    "experiments": [{"approach": "KS", "combo": "CM", "period": "sedentary",
                     "classifier": "binary"}]
  })");
  j["output_dir"] = out;
  return j;
}

Errc config_error(const Json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::Io;  // sentinel: no error
}

}  // namespace

TEST_CASE("parse_config defaults and validation") {
  const auto c = parse_config(Json::object());
  CHECK(c.seed == 42);
  CHECK(c.experiments.size() == 1);
  CHECK(c.selection.alpha == 0.05);
  CHECK(c.binary_kernel.degree == 2);
  CHECK(c.train.C == 1.0);
  CHECK(c.has_stage("eval"));
  CHECK_FALSE(c.has_stage("sweep-outlier"));
  CHECK(c.sd_top_k(ActivityPeriod::NonSedentary) == 30);

  CHECK(config_error(Json{{"sede", 1}}) == Errc::ConfigInvalid);
  CHECK(config_error(Json{{"seed", "x"}}) == Errc::ConfigInvalid);
  CHECK(config_error(Json{{"svm", {{"C", -1}}}}) == Errc::ConfigInvalid);
  CHECK(config_error(Json{{"svm", {{"kernel", 1}}}}) == Errc::ConfigInvalid);
  CHECK(config_error(Json{{"data", {{"source", "csv"}}}}) == Errc::ConfigInvalid);
  CHECK(config_error(Json{{"experiments", Json::array()}}) == Errc::ConfigInvalid);
  CHECK(config_error(Json{{"experiments", {{{"combo", "CQ"}}}}}) == Errc::ConfigInvalid);
  CHECK(config_error(Json{{"stages", {"train", "dance"}}}) == Errc::ConfigInvalid);
  CHECK(config_error(Json{{"selection", {{"tau", 0}}}}) == Errc::ConfigInvalid);
  CHECK(exit_code_for(Errc::ConfigInvalid) == 2);
  try {
    parse_config(Json{{"split", {{"train_fraction", 1.5}}}});
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("split.train_fraction") != std::string::npos);
  }

  const auto echo = config_to_json(c);
  const auto again = parse_config(echo);
  CHECK(config_to_json(again) == echo);
}

TEST_CASE("config_hash ignores where and how fast") {
  auto a = parse_config(Json::object());
  auto b = a;
  b.output_dir = "elsewhere";
  b.workers = 4;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 43;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("select_features nests the approaches") {
  const auto ds = generate_dataset(8, 4000, 3);
  const auto w = segment_windows(filter_aligned(ds.records).records, ActivityPeriod::Sedentary);
  const auto fm = build_feature_matrix(w, BiometricCombo::all(), false);
  const auto rows = group_rows(fm.rows);
  SelectionParams params;
  const auto ks = select_features(fm, rows, SelectionApproach::KS, params, 20);
  const auto pc = select_features(fm, rows, SelectionApproach::PC, params, 20);
  const auto sd = select_features(fm, rows, SelectionApproach::SD, params, 20);
  CHECK(pc.selected.size() <= ks.selected.size());
  CHECK(sd.selected.size() == std::min<std::size_t>(20, ks.selected.size()));
  CHECK(ks.selected.size() <= 108);
  for (const auto* sub : {&pc, &sd})
    for (const auto& n : sub->selected)
      CHECK(std::find(ks.selected.begin(), ks.selected.end(), n) != ks.selected.end());
  const auto big = select_features(fm, rows, SelectionApproach::SD, params, 1000);
  CHECK(big.selected.size() == ks.selected.size());
}

TEST_CASE("run_pipeline writes a reproducible run") {
  const fs::path root = fs::current_path() / "pipeline_runs";
  fs::remove_all(root);
  auto cfg = parse_config(minimal((root / "a").string()));
  const auto run = run_pipeline(cfg);
  REQUIRE(run.experiments.size() == 1);
  CHECK(run.experiments[0].report.n_subjects == 10);
  CHECK(run.experiments[0].report.per_subject.size() == 10);
  const auto name = cfg.experiments[0].name();
  CHECK(name == "KS_CM_sedentary_binary");
  for (const auto* f : {"manifest.json", "data.csv", "profiles.json", "ingest.json",
                        "features_CM_sedentary.csv", "summary.csv"})
    CHECK(fs::exists(run.run_dir / f));
  CHECK(fs::exists(run.run_dir / ("report_" + name + ".json")));
  CHECK(fs::exists(run.run_dir / ("featureset_" + name + ".json")));
  CHECK(fs::exists(run.run_dir / "models" / name / "S001.json"));

  const auto manifest = read_json_file(run.run_dir / "manifest.json");
  CHECK(manifest.at("seed") == 7);
  CHECK(manifest.at("version") == std::string(kVersion));
  CHECK(manifest.at("config") == config_to_json(cfg));
  CHECK(!manifest.at("input_hash").get<std::string>().empty());
  CHECK(manifest.contains("created_at"));

  // The manifest alone is enough to redo the run.
  auto redo = parse_config(manifest.at("config"));
  redo.output_dir = root / "b";
  redo.workers = 3;
  const auto run2 = run_pipeline(redo);
  for (const auto& f : {"report_" + name + ".json", "report_" + name + ".csv",
                        "featureset_" + name + ".json", std::string("summary.csv"),
                        std::string("features_CM_sedentary.csv"),
                        "models/" + name + "/S004.json"})
    CHECK(read_text_file(run.run_dir / f) == read_text_file(run2.run_dir / f));

  try {
    run_pipeline(cfg);
    FAIL("expected a refusal to overwrite");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidArgument);
  }
  fs::remove_all(root);
}

TEST_CASE("missing CSV fails the ingest stage") {
  const fs::path root = fs::current_path() / "pipeline_missing";
  fs::remove_all(root);
  auto j = minimal(root.string());
  j["data"] = {{"source", "csv"}, {"csv_path", (root / "nope.csv").string()}};
  try {
    run_pipeline(parse_config(j));
    FAIL("expected StageFailure");
  } catch (const StageFailure& e) {
    CHECK(e.stage() == "ingest");
    CHECK(e.code() == Errc::StageFailure);
  }
  fs::remove_all(root);
}

TEST_CASE("parallel_for reports the first failure by index") {
  std::vector<int> hit(20, 0);
  parallel_for(20, 4, [&](std::size_t i) { hit[i] = 1; });
  CHECK(std::count(hit.begin(), hit.end(), 1) == 20);
  try {
    parallel_for(10, 3, [&](std::size_t i) {
      if (i == 3 || i == 7) throw Error(Errc::EmptyScores, std::to_string(i));
    });
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "3");
  }
}
