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
#include "wearauth/eval.hpp"

#include <algorithm>
#include <cmath>

#include "wearauth/rng.hpp"

namespace wearauth {

RowsBySubject group_rows(const std::vector<WindowRef>& rows) {
  RowsBySubject out;
  for (std::size_t i = 0; i < rows.size(); ++i)
    out[rows[i].subject_id].push_back(static_cast<Eigen::Index>(i));
  return out;
}

RowsBySubject cap_windows(const RowsBySubject& rows, std::size_t cap,
                          std::uint64_t seed) {
  if (cap == 0) return rows;
  RowsBySubject out;
  for (const auto& [subject, idx] : rows) {
    auto kept = idx;
    if (kept.size() > cap) {
      Rng rng(derive_seed(seed, fnv1a64(subject)));
      rng.shuffle(std::span<Eigen::Index>(kept));
      kept.resize(cap);
      std::sort(kept.begin(), kept.end());
    }
    out.emplace(subject, std::move(kept));
  }
  return out;
}

Split make_split(const RowsBySubject& rows, const std::string& target,
                 const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw Error(Errc::InvalidArgument, "train_fraction must lie in (0, 1)");
  const auto it = rows.find(target);
  const std::size_t n = it == rows.end() ? 0 : it->second.size();
  if (n < kMinWindowsPerSubject)
    throw Error(Errc::InsufficientWindows,
                "subject '" + target + "' has " + std::to_string(n) +
                    " windows; at least " + std::to_string(kMinWindowsPerSubject) +
                    " required");

  Rng rng(derive_seed(spec.seed, fnv1a64(target)));
  const auto n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n))),
      1, n - 1);

  Split split;
  auto pos = it->second;
  if (!spec.chronological) rng.shuffle(std::span<Eigen::Index>(pos));
  split.train_pos.assign(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test_pos.assign(pos.begin() + static_cast<std::ptrdiff_t>(n_train), pos.end());

  std::vector<std::vector<Eigen::Index>> impostors;
  for (const auto& [subject, idx] : rows) {
    if (subject == target || idx.empty()) continue;
    impostors.push_back(idx);
    if (!spec.chronological) rng.shuffle(std::span<Eigen::Index>(impostors.back()));
  }
  if (!spec.chronological)
    rng.shuffle(std::span<std::vector<Eigen::Index>>(impostors));

  std::size_t pool = 0;
  for (const auto& v : impostors) pool += v.size();
  const std::size_t needed = spec.balanced ? n : pool;
  if (pool < needed || pool < 2)
    throw Error(Errc::InsufficientWindows,
                "impostor pool of " + std::to_string(pool) +
                    " windows cannot balance subject '" + target + "'");

  // Round-robin over impostors keeps any single impostor from dominating.
  std::vector<Eigen::Index> picks;
  picks.reserve(needed);
  for (std::size_t round = 0; picks.size() < needed; ++round) {
    for (const auto& v : impostors) {
      if (round < v.size()) picks.push_back(v[round]);
      if (picks.size() == needed) break;
    }
  }
  const std::size_t neg_train =
      spec.balanced ? n_train
                    : std::clamp<std::size_t>(
                          static_cast<std::size_t>(std::llround(
                              spec.train_fraction * static_cast<double>(needed))),
                          1, needed - 1);
  split.train_neg.assign(picks.begin(), picks.begin() + static_cast<std::ptrdiff_t>(neg_train));
  split.test_neg.assign(picks.begin() + static_cast<std::ptrdiff_t>(neg_train), picks.end());
  return split;
}

Metrics evaluate_scores(std::span<const double> genuine,
                        std::span<const double> impostor, double threshold) {
  if (genuine.empty() || impostor.empty())
    throw Error(Errc::EmptyTestSet, "evaluation needs genuine and impostor scores");
  Metrics m;
  for (double s : genuine) (s >= threshold ? m.tp : m.fn) += 1;
  for (double s : impostor) (s >= threshold ? m.fp : m.tn) += 1;
  const auto total = static_cast<double>(genuine.size() + impostor.size());
  m.acc = static_cast<double>(m.tp + m.tn) / total;
  m.fpr = static_cast<double>(m.fp) / static_cast<double>(impostor.size());
  m.fnr = static_cast<double>(m.fn) / static_cast<double>(genuine.size());
  return m;
}

namespace {

std::vector<double> scores_for(const TrainedModel& model, const Eigen::MatrixXd& x,
                               std::span<const Eigen::Index> rows, ScoreKind kind) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (auto r : rows) {
    const Eigen::VectorXd v = x.row(r).transpose();
    out.push_back(kind == ScoreKind::Decision ? decision_value(model, v)
                                              : predict_proba(model, v));
  }
  return out;
}

}  // namespace

Metrics evaluate_model(const TrainedModel& model, const Eigen::MatrixXd& x,
                       std::span<const Eigen::Index> test_pos,
                       std::span<const Eigen::Index> test_neg, double threshold,
                       ScoreKind kind) {
  if (test_pos.empty() || test_neg.empty())
    throw Error(Errc::EmptyTestSet, "evaluation needs genuine and impostor windows");
  const auto g = scores_for(model, x, test_pos, kind);
  const auto i = scores_for(model, x, test_neg, kind);
  return evaluate_scores(g, i, threshold);
}

EerResult compute_eer(std::span<const double> genuine,
                      std::span<const double> impostor) {
  if (genuine.empty() || impostor.empty())
    throw Error(Errc::EmptyScores, "EER needs genuine and impostor scores");
  std::vector<double> g(genuine.begin(), genuine.end());
  std::vector<double> imp(impostor.begin(), impostor.end());
  std::sort(g.begin(), g.end());
  std::sort(imp.begin(), imp.end());
  std::vector<double> thresholds = g;
  thresholds.insert(thresholds.end(), imp.begin(), imp.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const auto ng = static_cast<double>(g.size());
  const auto ni = static_cast<double>(imp.size());
  const auto fnr_at = [&](double t) {
    return static_cast<double>(std::lower_bound(g.begin(), g.end(), t) - g.begin()) / ng;
  };
  const auto fpr_at = [&](double t) {
    return static_cast<double>(imp.end() - std::lower_bound(imp.begin(), imp.end(), t)) / ni;
  };

  // At the lowest score FNR = 0 and FPR = 1; at the highest FNR >= FPR.
  double prev_t = thresholds.front();
  double prev_fnr = fnr_at(prev_t), prev_fpr = fpr_at(prev_t);
  for (std::size_t k = 1; k < thresholds.size(); ++k) {
    const double t = thresholds[k];
    const double fnr = fnr_at(t), fpr = fpr_at(t);
    if (fnr >= fpr) {
      const double d0 = prev_fnr - prev_fpr;
      const double d1 = fnr - fpr;
      const double w = d1 == d0 ? 1.0 : -d0 / (d1 - d0);
      return {prev_fnr + w * (fnr - prev_fnr), prev_t + w * (t - prev_t)};
    }
    prev_t = t;
    prev_fnr = fnr;
    prev_fpr = fpr;
  }
  // Only reachable when every score is identical.
  return {0.5 * (prev_fnr + prev_fpr), prev_t};
}

std::vector<double> default_probability_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(static_cast<double>(i) / 100.0);
  return grid;
}

std::vector<SweepRow> sweep_threshold(std::span<const double> genuine,
                                      std::span<const double> impostor,
                                      std::span<const double> grid) {
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<SweepRow> rows;
  rows.reserve(sorted.size());
  for (double t : sorted) {
    const auto m = evaluate_scores(genuine, impostor, t);
    rows.push_back({t, m.acc, m.fpr, m.fnr});
  }
  return rows;
}

std::vector<SweepRow> sweep_probability_threshold(const TrainedModel& model,
                                                  const Eigen::MatrixXd& x,
                                                  const Split& split,
                                                  std::span<const double> grid) {
  if (!model.platt)
    throw Error(Errc::PlattNotFitted, "threshold sweep needs a calibrated model");
  const auto g = scores_for(model, x, split.test_pos, ScoreKind::Probability);
  const auto i = scores_for(model, x, split.test_neg, ScoreKind::Probability);
  return sweep_threshold(g, i, grid);
}

std::vector<OutlierRow> sweep_outlier_fraction(const Eigen::MatrixXd& x,
                                               const Split& split,
                                               std::span<const double> nu_grid,
                                               const KernelSpec& kernel,
                                               const TrainConfig& config) {
  std::vector<double> grid(nu_grid.begin(), nu_grid.end());
  std::sort(grid.begin(), grid.end());
  const Eigen::MatrixXd train = x(split.train_pos, Eigen::all);
  std::vector<OutlierRow> rows;
  for (double nu : grid) {
    TrainConfig cfg = config;
    cfg.nu = nu;
    const auto model = train_unary(train, kernel, cfg);
    const auto m = evaluate_model(model, x, split.test_pos, split.test_neg, 0.0);
    rows.push_back({nu, m.acc, m.fpr, m.fnr});
  }
  return rows;
}

EvalReport aggregate_report(std::vector<SubjectResult> per_subject,
                            ReportMetadata meta) {
  if (per_subject.empty())
    throw Error(Errc::EmptyResults, "no per-subject results to aggregate");
  EvalReport report;
  report.meta = std::move(meta);
  report.n_subjects = per_subject.size();
  report.sd_defined = per_subject.size() > 1;

  const auto summarise = [&](auto field) {
    const auto n = static_cast<double>(per_subject.size());
    double sum = 0.0;
    for (const auto& r : per_subject) sum += field(r);
    MetricSummary s;
    s.mean = sum / n;
    if (per_subject.size() > 1) {
      double ss = 0.0;
      for (const auto& r : per_subject) ss += (field(r) - s.mean) * (field(r) - s.mean);
      s.sd = std::sqrt(ss / (n - 1.0));
    }
    return s;
  };
  report.acc = summarise([](const SubjectResult& r) { return r.acc; });
  report.fpr = summarise([](const SubjectResult& r) { return r.fpr; });
  report.fnr = summarise([](const SubjectResult& r) { return r.fnr; });

  double eer_sum = 0.0, thr_sum = 0.0;
  std::size_t with_eer = 0;
  for (const auto& r : per_subject) {
    if (!r.eer) continue;
    eer_sum += r.eer->eer;
    thr_sum += r.eer->threshold;
    ++with_eer;
  }
  if (with_eer > 0) {
    report.eer = EerResult{eer_sum / static_cast<double>(with_eer),
                           thr_sum / static_cast<double>(with_eer)};
  }
  report.per_subject = std::move(per_subject);
  return report;
}

}  // namespace wearauth
