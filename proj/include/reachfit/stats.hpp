#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reachfit/models.hpp"

namespace reachfit {

struct AnovaResult {
  double f = 0.0;
  double df_between = 0.0;
  double df_within = 0.0;
  double p = 1.0;
};

// One-way repeated-measures ANOVA: rows are subjects (trials), columns are
// conditions (models). Throws TooFewTrials below two complete rows.
AnovaResult repeated_measures_anova(const std::vector<std::vector<double>>& table);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// Throws DegenerateData when the differences have zero variance.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m);

// Upper tail of the F distribution and two-sided Student t tail.
double f_upper_tail(double f, double df1, double df2);
double t_two_sided(double t, double df);

struct TrialOutcome {
  std::string trial_id;
  std::array<double, 3> errors{};  // indexed by ModelKind
  ConicClass conic_class = ConicClass::Ellipse;
  bool circle = false;

  ModelKind best_model() const;
};

struct SummaryStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
  double max = 0.0;
};

struct PairwiseTest {
  ModelKind a = ModelKind::Conic;
  ModelKind b = ModelKind::MinJerk;
  std::optional<TTestResult> test;
  double p_bonferroni = 1.0;
  std::string note;
};

struct RatioStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;
};

struct ComparisonResult {
  std::size_t n_trials = 0;
  std::array<SummaryStats, 3> error_stats{};
  std::optional<AnovaResult> anova;
  std::string anova_note;
  std::vector<PairwiseTest> pairwise;
  std::array<std::size_t, 3> best_fit_counts{};
  std::array<std::size_t, 3> conic_class_counts{};  // indexed by ConicClass
  std::size_t circle_count = 0;
  // DMJ error / conic error over trials where the conic fits best, and the
  // reverse ratio over trials where DMJ fits best.
  RatioStats dmj_over_conic;
  RatioStats conic_over_dmj;

  double best_fit_percent(ModelKind k) const;
  double class_percent(ConicClass c) const;
};

ComparisonResult aggregate(std::span<const TrialOutcome> outcomes);

}  // namespace reachfit
