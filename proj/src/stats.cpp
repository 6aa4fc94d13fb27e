#include "reachfit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "reachfit/error.hpp"

namespace reachfit {

double f_upper_tail(double f, double df1, double df2) {
  if (!(f > 0.0)) return 1.0;
  if (std::isinf(f)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f(df1, df2), f));
}

double t_two_sided(double t, double df) {
  if (std::isinf(t)) return 0.0;
  return 2.0 * boost::math::cdf(
                   boost::math::complement(boost::math::students_t(df), std::abs(t)));
}

AnovaResult repeated_measures_anova(const std::vector<std::vector<double>>& table) {
  const std::size_t n = table.size();
  if (n < 2) fail(ErrorCode::TooFewTrials, "ANOVA needs at least 2 trials");
  const std::size_t k = table.front().size();
  if (k < 2) fail(ErrorCode::TooFewTrials, "ANOVA needs at least 2 conditions");
  for (const auto& row : table) {
    if (row.size() != k) fail(ErrorCode::TooFewTrials, "ANOVA rows must be complete");
  }

  double grand = 0.0;
  for (const auto& row : table) grand += std::accumulate(row.begin(), row.end(), 0.0);
  grand /= static_cast<double>(n * k);

  double ss_total = 0.0, ss_subjects = 0.0, ss_conditions = 0.0;
  std::vector<double> cond_mean(k, 0.0);
  for (const auto& row : table) {
    const double subject_mean =
        std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(k);
    ss_subjects += static_cast<double>(k) * (subject_mean - grand) * (subject_mean - grand);
    for (std::size_t j = 0; j < k; ++j) {
      ss_total += (row[j] - grand) * (row[j] - grand);
      cond_mean[j] += row[j] / static_cast<double>(n);
    }
  }
  for (double m : cond_mean) ss_conditions += static_cast<double>(n) * (m - grand) * (m - grand);
  const double ss_error = std::max(ss_total - ss_subjects - ss_conditions, 0.0);

  AnovaResult r;
  r.df_between = static_cast<double>(k - 1);
  r.df_within = static_cast<double>((k - 1) * (n - 1));
  // Scale the zero test to the data so rounding residue does not count as an
  // effect.
  const double zero = 1e-24 * std::max(ss_total, 1e-300);
  if (ss_conditions <= zero) {
    r.f = 0.0;
    r.p = 1.0;
  } else if (ss_error <= zero) {
    r.f = std::numeric_limits<double>::infinity();
    r.p = 0.0;
  } else {
    r.f = (ss_conditions / r.df_between) / (ss_error / r.df_within);
    r.p = f_upper_tail(r.f, r.df_between, r.df_within);
  }
  return r;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    fail(ErrorCode::DegenerateData, "paired t-test needs two equal samples of size >= 2");
  }
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 1e-12 * std::max(std::abs(mean), 1e-300))) {
    fail(ErrorCode::DegenerateData, "differences have zero variance");
  }
  TTestResult r;
  r.df = static_cast<double>(n - 1);
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = t_two_sided(r.t, r.df);
  return r;
}

std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m) {
  std::vector<double> out;
  out.reserve(p_values.size());
  for (double p : p_values) out.push_back(std::min(1.0, static_cast<double>(m) * p));
  return out;
}

ModelKind TrialOutcome::best_model() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (errors[i] < errors[best]) best = i;
  }
  return static_cast<ModelKind>(best);
}

double ComparisonResult::best_fit_percent(ModelKind k) const {
  return n_trials == 0 ? 0.0
                       : 100.0 * static_cast<double>(best_fit_counts[static_cast<std::size_t>(k)]) /
                             static_cast<double>(n_trials);
}

double ComparisonResult::class_percent(ConicClass c) const {
  return n_trials == 0 ? 0.0
                       : 100.0 * static_cast<double>(conic_class_counts[static_cast<std::size_t>(c)]) /
                             static_cast<double>(n_trials);
}

namespace {

SummaryStats summarize(const std::vector<double>& v) {
  SummaryStats s;
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  s.max = *std::max_element(v.begin(), v.end());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

RatioStats ratio_stats(const std::vector<double>& v) {
  const SummaryStats s = summarize(v);
  return {v.size(), s.mean, s.std};
}

}  // namespace

ComparisonResult aggregate(std::span<const TrialOutcome> outcomes) {
  ComparisonResult r;
  r.n_trials = outcomes.size();
  std::array<std::vector<double>, 3> columns;
  std::vector<std::vector<double>> table;
  std::vector<double> dmj_ratio, conic_ratio;
  for (const auto& o : outcomes) {
    for (std::size_t m = 0; m < 3; ++m) columns[m].push_back(o.errors[m]);
    table.emplace_back(o.errors.begin(), o.errors.end());
    const ModelKind best = o.best_model();
    ++r.best_fit_counts[static_cast<std::size_t>(best)];
    ++r.conic_class_counts[static_cast<std::size_t>(o.conic_class)];
    if (o.circle) ++r.circle_count;
    const double conic = o.errors[0], dmj = o.errors[1];
    if (best == ModelKind::Conic && conic > 0.0) dmj_ratio.push_back(dmj / conic);
    if (best == ModelKind::DecoupledMinJerk && dmj > 0.0) conic_ratio.push_back(conic / dmj);
  }
  for (std::size_t m = 0; m < 3; ++m) r.error_stats[m] = summarize(columns[m]);
  r.dmj_over_conic = ratio_stats(dmj_ratio);
  r.conic_over_dmj = ratio_stats(conic_ratio);

  if (outcomes.size() < 2) {
    r.anova_note = "skipped: fewer than 2 trials";
  } else {
    r.anova = repeated_measures_anova(table);
  }

  constexpr std::array<std::pair<ModelKind, ModelKind>, 3> pairs = {{
      {ModelKind::Conic, ModelKind::DecoupledMinJerk},
      {ModelKind::Conic, ModelKind::MinJerk},
      {ModelKind::DecoupledMinJerk, ModelKind::MinJerk},
  }};
  for (const auto& [a, b] : pairs) {
    PairwiseTest pt;
    pt.a = a;
    pt.b = b;
    try {
      pt.test = paired_t_test(columns[static_cast<std::size_t>(a)],
                              columns[static_cast<std::size_t>(b)]);
      pt.p_bonferroni = std::min(1.0, 3.0 * pt.test->p);
    } catch (const Error& e) {
      pt.note = std::string("skipped: ") + e.what();
    }
    r.pairwise.push_back(std::move(pt));
  }
  return r;
}

}  // namespace reachfit
