#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reachfit/error.hpp"
#include "reachfit/metrics.hpp"
#include "reachfit/models.hpp"
#include "reachfit/signal.hpp"
#include "reachfit/stats.hpp"

namespace reachfit {

struct PipelineConfig {
  SegmentConfig segment;
  DmjConfig dmj;
  double parabola_tol = 1e-6;
  BoundaryMode boundary = BoundaryMode::RestToRest;
  ErrorMode error_mode = ErrorMode::Full3D;
  unsigned jobs = 1;
  std::vector<std::string> exclude_trials;
};

// Throws ConfigError.
void validate(const PipelineConfig& cfg);

// Flat `key = value` file; unknown keys and malformed values are ConfigError.
PipelineConfig parse_config(std::istream& in);
PipelineConfig load_config(const std::string& path);
void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value);

// Every key with its value, in a fixed order; parse_config accepts the
// result unchanged.
std::vector<std::pair<std::string, std::string>> config_entries(const PipelineConfig& cfg);
void write_config(std::ostream& out, const PipelineConfig& cfg);

struct Exclusion {
  std::string trial_id;
  ErrorCode code = ErrorCode::ValidationError;
  std::string reason;
};

struct Dataset {
  std::vector<HandoverTrial> trials;
  std::vector<Exclusion> exclusions;

  std::size_t input_count() const { return trials.size() + exclusions.size(); }
};

// Canonical CSV: header trial_id,t,gx,gy,gz,rx,ry,rz,ox,oy,oz, rows grouped by
// trial. Malformed text throws ParseError with line and column; trials with
// missing samples or gaps become exclusions, and slightly irregular timing is
// resampled onto a uniform grid.
Dataset parse_canonical_csv(std::istream& in);
void write_canonical_csv(std::ostream& out, std::span<const HandoverTrial> trials);

// `format` names a registered adapter; only "canonical" ships.
Dataset ingest(const std::string& path, const std::string& format = "canonical");
std::vector<std::string> ingest_formats();

struct TrialReport {
  std::string trial_id;
  double t_ogc = 0.0, t_rgc = 0.0, t_start = 0.0, t_end = 0.0;
  ReachCase case_label = ReachCase::Case1;
  std::size_t n_samples = 0;
  std::size_t n_inliers = 0;
  Eigen::Vector3d plane_normal = Eigen::Vector3d::UnitZ();
  ConicCoeffs conic_mm = ConicCoeffs::Zero();
  ConicClass conic_class = ConicClass::Ellipse;
  bool circle = false;
  double dmj_ratio = 1.0;
  std::array<double, 3> path_error_mm{};  // indexed by ModelKind
  double mj_temporal_error_mm = 0.0;
  double dmj_temporal_error_mm = 0.0;

  ModelKind best_model() const;
  TrialOutcome outcome() const;
};

// Runs segmentation, the three fits and their errors on one trial. Throws on
// any failure.
TrialReport analyze_trial(const HandoverTrial& trial, const PipelineConfig& cfg);

struct AnalysisResult {
  PipelineConfig config;
  std::size_t input_count = 0;
  std::vector<TrialReport> trials;     // sorted by trial_id
  std::vector<Exclusion> exclusions;   // sorted by trial_id
  ComparisonResult summary;
};

// Never throws for a single bad trial; failures become exclusions.
AnalysisResult analyze(const Dataset& data, const PipelineConfig& cfg);

// Recomputes `summary` from `trials`.
void summarize(AnalysisResult& result);

}  // namespace reachfit
