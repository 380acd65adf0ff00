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
#include "wearauth/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace wearauth {

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

Json vec(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd to_vector(const Json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a.at(i).get<double>();
  return v;
}

std::string kernel_name(KernelKind k) {
  return k == KernelKind::QuadraticPoly ? "quadratic_poly" : "gaussian_rbf";
}

KernelKind kernel_kind(const std::string& s) {
  if (s == "quadratic_poly") return KernelKind::QuadraticPoly;
  if (s == "gaussian_rbf") return KernelKind::GaussianRBF;
  throw Error(Errc::CorruptFile, "unknown kernel kind '" + s + "'");
}

Json config_json(const TrainConfig& c) {
  return {{"C", c.C},         {"nu", c.nu},       {"tol", c.tol},
          {"max_passes", c.max_passes}, {"seed", c.seed},
          {"normalize", c.normalize}, {"calibrate", c.calibrate}};
}

TrainConfig config_from(const Json& j) {
  TrainConfig c;
  c.C = j.at("C").get<double>();
  c.nu = j.at("nu").get<double>();
  c.tol = j.at("tol").get<double>();
  c.max_passes = j.at("max_passes").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.normalize = j.at("normalize").get<bool>();
  c.calibrate = j.at("calibrate").get<bool>();
  return c;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                     : comma - start);
    if (!field.empty() && field.back() == '\r') field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_cell(std::string_view cell, std::size_t line) {
  T v{};
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc{} || ptr != end)
    throw MalformedRow(line, "cannot parse '" + std::string(cell) + "'");
  return v;
}

}  // namespace

Json to_json(const FeatureSetSpec& spec) {
  return {{"approach", to_string(spec.approach)},
          {"combo", spec.combo},
          {"period", spec.period},
          {"params",
           {{"alpha", spec.params.alpha},
            {"tau", spec.params.tau},
            {"rho", spec.params.rho},
            {"sd_top_k", spec.params.sd_top_k}}},
          {"selected", spec.selected},
          {"ks_significance", spec.ks_significance}};
}

FeatureSetSpec feature_set_from_json(const Json& j) {
  try {
    FeatureSetSpec s;
    s.approach = parse_selection_approach(j.at("approach").get<std::string>());
    s.combo = j.value("combo", "");
    s.period = j.value("period", "");
    const auto& p = j.at("params");
    s.params.alpha = p.at("alpha").get<double>();
    s.params.tau = p.at("tau").get<double>();
    s.params.rho = p.at("rho").get<double>();
    s.params.sd_top_k = p.at("sd_top_k").get<int>();
    s.selected = j.at("selected").get<std::vector<std::string>>();
    s.ks_significance = j.value("ks_significance", std::vector<int>{});
    if (s.selected.empty()) throw Error(Errc::CorruptFile, "feature set is empty");
    return s;
  } catch (const Json::exception& e) {
    throw Error(Errc::CorruptFile, std::string("feature set: ") + e.what());
  }
}

Json to_json(const TrainedModel& m) {
  Json sv = Json::array();
  for (Eigen::Index r = 0; r < m.support_vectors.rows(); ++r)
    sv.push_back(vec(m.support_vectors.row(r).transpose()));
  return {{"schema_version", kModelSchemaVersion},
          {"kind", m.kind == ModelKind::Binary ? "binary" : "unary"},
          {"subject_id", m.subject_id},
          {"kernel",
           {{"kind", kernel_name(m.kernel.kind)},
            {"gamma", m.kernel.gamma},
            {"degree", m.kernel.degree}}},
          {"norm", {{"mean", vec(m.norm.mean)}, {"scale", vec(m.norm.scale)}}},
          {"support_vectors", sv},
          {"alphas", vec(m.alphas)},
          {"labels", vec(m.labels)},
          {"bias", m.bias},
          {"rho", m.rho},
          {"nu", m.nu},
          {"platt", m.platt ? Json{{"A", m.platt->A}, {"B", m.platt->B}} : Json(nullptr)},
          {"features", m.features},
          {"config", config_json(m.config)},
          {"training_size", m.training_size}};
}

TrainedModel model_from_json(const Json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version > kModelSchemaVersion)
      throw Error(Errc::SchemaVersionMismatch,
                  "model schema version " + std::to_string(version) +
                      " is newer than supported version " +
                      std::to_string(kModelSchemaVersion));
    if (version < 1) throw Error(Errc::CorruptFile, "invalid schema version");
    TrainedModel m;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "binary") m.kind = ModelKind::Binary;
    else if (kind == "unary") m.kind = ModelKind::Unary;
    else throw Error(Errc::CorruptFile, "unknown model kind '" + kind + "'");
    m.subject_id = j.at("subject_id").get<std::string>();
    const auto& k = j.at("kernel");
    m.kernel = {kernel_kind(k.at("kind").get<std::string>()), k.at("gamma").get<double>(),
                k.at("degree").get<int>()};
    m.norm.mean = to_vector(j.at("norm").at("mean"));
    m.norm.scale = to_vector(j.at("norm").at("scale"));
    const auto& sv = j.at("support_vectors");
    const auto dim = m.norm.mean.size();
    m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), dim);
    for (std::size_t r = 0; r < sv.size(); ++r) {
      const auto row = to_vector(sv.at(r));
      if (row.size() != dim) throw Error(Errc::CorruptFile, "support vector dimension mismatch");
      m.support_vectors.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    m.alphas = to_vector(j.at("alphas"));
    m.labels = to_vector(j.at("labels"));
    if (m.alphas.size() != m.support_vectors.rows() ||
        m.labels.size() != m.support_vectors.rows() || m.norm.scale.size() != dim)
      throw Error(Errc::CorruptFile, "model arrays have inconsistent lengths");
    m.bias = j.at("bias").get<double>();
    m.rho = j.at("rho").get<double>();
    m.nu = j.at("nu").get<double>();
    if (!j.at("platt").is_null())
      m.platt = PlattParams{j.at("platt").at("A").get<double>(),
                            j.at("platt").at("B").get<double>()};
    m.features = j.at("features").get<std::vector<std::string>>();
    m.config = config_from(j.at("config"));
    m.training_size = j.at("training_size").get<std::size_t>();
    return m;
  } catch (const Json::exception& e) {
    throw Error(Errc::CorruptFile, std::string("model: ") + e.what());
  }
}

Json to_json(const EvalReport& r) {
  const auto summary = [](const MetricSummary& s) {
    return Json{{"mean", s.mean}, {"sd", s.sd}};
  };
  const auto eer_json = [](const std::optional<EerResult>& e) {
    return e ? Json{{"rate", e->eer}, {"threshold", e->threshold}} : Json(nullptr);
  };
  Json rows = Json::array();
  for (const auto& s : r.per_subject) {
    rows.push_back({{"subject_id", s.subject_id},
                    {"ACC", s.acc},
                    {"FPR", s.fpr},
                    {"FNR", s.fnr},
                    {"eer", eer_json(s.eer)}});
  }
  return {{"approach", r.meta.approach},
          {"combo", r.meta.combo},
          {"period", r.meta.period},
          {"classifier", r.meta.classifier},
          {"n", r.meta.n_features},
          {"N", r.n_subjects},
          {"W", r.meta.windows_per_subject},
          {"notes", r.meta.notes},
          {"aggregate",
           {{"ACC", summary(r.acc)},
            {"FPR", summary(r.fpr)},
            {"FNR", summary(r.fnr)},
            {"sd_defined", r.sd_defined}}},
          {"eer", eer_json(r.eer)},
          {"per_subject", rows}};
}

EvalReport report_from_json(const Json& j) {
  try {
    EvalReport r;
    r.meta.approach = j.at("approach").get<std::string>();
    r.meta.combo = j.at("combo").get<std::string>();
    r.meta.period = j.at("period").get<std::string>();
    r.meta.classifier = j.at("classifier").get<std::string>();
    r.meta.n_features = j.at("n").get<std::size_t>();
    r.meta.windows_per_subject = j.at("W").get<std::size_t>();
    r.meta.notes = j.at("notes").get<std::vector<std::string>>();
    r.n_subjects = j.at("N").get<std::size_t>();
    const auto& a = j.at("aggregate");
    const auto summary = [](const Json& s) {
      return MetricSummary{s.at("mean").get<double>(), s.at("sd").get<double>()};
    };
    r.acc = summary(a.at("ACC"));
    r.fpr = summary(a.at("FPR"));
    r.fnr = summary(a.at("FNR"));
    r.sd_defined = a.at("sd_defined").get<bool>();
    const auto eer = [](const Json& e) -> std::optional<EerResult> {
      if (e.is_null()) return std::nullopt;
      return EerResult{e.at("rate").get<double>(), e.at("threshold").get<double>()};
    };
    r.eer = eer(j.at("eer"));
    for (const auto& s : j.at("per_subject")) {
      r.per_subject.push_back({s.at("subject_id").get<std::string>(),
                               s.at("ACC").get<double>(), s.at("FPR").get<double>(),
                               s.at("FNR").get<double>(), eer(s.at("eer"))});
    }
    return r;
  } catch (const Json::exception& e) {
    throw Error(Errc::CorruptFile, std::string("report: ") + e.what());
  }
}

Json to_json(const std::vector<SubjectProfile>& profiles) {
  Json out = Json::array();
  for (const auto& p : profiles) {
    out.push_back({{"subject_id", p.subject_id},
                   {"seed", p.seed},
                   {"weight_kg", p.weight_kg},
                   {"age_years", p.age_years},
                   {"resting_hr", p.resting_hr},
                   {"hr_gain", p.hr_gain},
                   {"step_rate", p.step_rate},
                   {"hr_autocorrelation", p.hr_autocorrelation},
                   {"daily_hr_drift", p.daily_hr_drift},
                   {"noise",
                    {{"heart_rate", p.noise.heart_rate},
                     {"calories", p.noise.calories},
                     {"steps", p.noise.steps}}}});
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(Errc::Io, "write to '" + path.string() + "' failed");
}

Json read_json_file(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(Errc::CorruptFile, "'" + path.string() + "': " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

void persist_model(const std::filesystem::path& path, const TrainedModel& model) {
  write_json_file(path, to_json(model));
}

TrainedModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_json_file(path));
}

void write_feature_matrix(std::ostream& out, const FeatureMatrix& fm) {
  std::vector<Eigen::Index> cols;
  out << "subject_id,start_minute,activity_level";
  for (std::size_t c = 0; c < fm.names.size(); ++c) {
    if (fm.names[c] == kActivityFeature) continue;
    cols.push_back(static_cast<Eigen::Index>(c));
    out << ',' << fm.names[c];
  }
  out << '\n';
  for (std::size_t r = 0; r < fm.rows.size(); ++r) {
    const auto& ref = fm.rows[r];
    out << ref.subject_id << ',' << ref.start_minute << ',' << to_string(ref.level);
    for (auto c : cols) out << ',' << format_double(fm.values(static_cast<Eigen::Index>(r), c));
    out << '\n';
  }
}

FeatureMatrix read_feature_matrix(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw Error(Errc::EmptyInput, "feature matrix has no header");
  const auto header = split_csv(line);
  if (header.size() < 4 || header[0] != "subject_id" || header[1] != "start_minute" ||
      header[2] != "activity_level")
    throw MalformedRow(1, "feature matrix header must start with "
                          "subject_id,start_minute,activity_level");
  FeatureMatrix fm;
  for (std::size_t c = 3; c < header.size(); ++c) fm.names.emplace_back(header[c]);
  std::vector<std::vector<double>> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() != header.size())
      throw MalformedRow(line_no, "expected " + std::to_string(header.size()) + " fields");
    WindowRef ref;
    ref.subject_id = std::string(f[0]);
    ref.start_minute = parse_cell<std::int64_t>(f[1], line_no);
    const auto level = parse_activity_level(f[2]);
    if (!level) throw MalformedRow(line_no, "unknown activity level");
    ref.level = *level;
    std::vector<double> row;
    for (std::size_t c = 3; c < f.size(); ++c) row.push_back(parse_cell<double>(f[c], line_no));
    values.push_back(std::move(row));
    fm.rows.push_back(std::move(ref));
  }
  const bool activity =
      !fm.rows.empty() && std::all_of(fm.rows.begin(), fm.rows.end(), [](const WindowRef& r) {
        return r.level != ActivityLevel::Sedentary;
      });
  if (activity) fm.names.emplace_back(kActivityFeature);
  fm.values.resize(static_cast<Eigen::Index>(fm.rows.size()),
                   static_cast<Eigen::Index>(fm.names.size()));
  for (std::size_t r = 0; r < values.size(); ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    for (std::size_t c = 0; c < values[r].size(); ++c)
      fm.values(ri, static_cast<Eigen::Index>(c)) = values[r][c];
    if (activity)
      fm.values(ri, fm.values.cols() - 1) = static_cast<double>(fm.rows[r].level);
  }
  return fm;
}

void write_report_csv(std::ostream& out, const EvalReport& r) {
  out << "subject_id,ACC,FPR,FNR,EER,EER_threshold\n";
  for (const auto& s : r.per_subject) {
    out << s.subject_id << ',' << format_double(s.acc) << ',' << format_double(s.fpr)
        << ',' << format_double(s.fnr) << ',';
    if (s.eer) out << format_double(s.eer->eer) << ',' << format_double(s.eer->threshold);
    else out << ',';
    out << '\n';
  }
  out << "aggregate_mean," << format_double(r.acc.mean) << ',' << format_double(r.fpr.mean)
      << ',' << format_double(r.fnr.mean) << ',';
  if (r.eer) out << format_double(r.eer->eer) << ',' << format_double(r.eer->threshold);
  else out << ',';
  out << '\n';
  out << "aggregate_sd," << format_double(r.acc.sd) << ',' << format_double(r.fpr.sd)
      << ',' << format_double(r.fnr.sd) << ",,\n";
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "threshold,ACC,FPR,FNR\n";
  for (const auto& r : rows)
    out << format_double(r.threshold) << ',' << format_double(r.acc) << ','
        << format_double(r.fpr) << ',' << format_double(r.fnr) << '\n';
}

void write_outlier_csv(std::ostream& out, const std::vector<OutlierRow>& rows) {
  out << "nu,ACC,FPR,FNR\n";
  for (const auto& r : rows)
    out << format_double(r.nu) << ',' << format_double(r.acc) << ','
        << format_double(r.fpr) << ',' << format_double(r.fnr) << '\n';
}

}  // namespace wearauth
