#include <algorithm>
#include <exception>
#include <set>
#include <thread>

#include "reachfit/pipeline.hpp"

namespace reachfit {

ModelKind TrialReport::best_model() const { return outcome().best_model(); }

TrialOutcome TrialReport::outcome() const {
  TrialOutcome o;
  o.trial_id = trial_id;
  o.errors = path_error_mm;
  o.conic_class = conic_class;
  o.circle = circle;
  return o;
}

TrialReport analyze_trial(const HandoverTrial& trial, const PipelineConfig& cfg) {
  const SegmentedReach reach = segment_trial(trial, cfg.segment);
  try {
    const Trajectory inliers = reach.inliers();
    const PlaneFrame frame = plane_frame(reach.plane);

    ConicModel conic = fit_conic(project_to_plane(inliers.positions, frame).points);
    conic.frame = frame;
    conic.conic_class = classify_conic(conic, cfg.parabola_tol);
    const MinJerkModel mj = fit_min_jerk(inliers, cfg.boundary);
    const DecoupledMinJerkModel dmj = fit_decoupled_min_jerk(reach, cfg.dmj);

    TrialReport r;
    r.trial_id = trial.trial_id;
    r.t_ogc = reach.t_ogc;
    r.t_rgc = reach.t_rgc;
    r.t_start = reach.t_start;
    r.t_end = reach.t_end;
    r.case_label = reach.case_label;
    r.n_samples = reach.segment.size();
    r.n_inliers = inliers.size();
    r.plane_normal = reach.plane.normal;
    r.conic_mm = conic.coefficients_mm();
    r.conic_class = *conic.conic_class;
    r.circle = r.conic_class == ConicClass::Ellipse && is_circle(conic, cfg.parabola_tol);
    r.dmj_ratio = dmj.ratio;
    r.path_error_mm[static_cast<std::size_t>(ModelKind::Conic)] =
        path_error(inliers.positions, conic, cfg.error_mode).mean_mm;
    r.path_error_mm[static_cast<std::size_t>(ModelKind::DecoupledMinJerk)] =
        path_error(inliers.positions, dmj, cfg.error_mode).mean_mm;
    r.path_error_mm[static_cast<std::size_t>(ModelKind::MinJerk)] =
        path_error(inliers.positions, mj).mean_mm;
    r.mj_temporal_error_mm = temporal_error(inliers, mj).mean_mm;
    r.dmj_temporal_error_mm = temporal_error(inliers, dmj).mean_mm;
    return r;
  } catch (const Error& e) {
    throw Error(e.code(), trial.trial_id + ": " + e.what());
  }
}

void summarize(AnalysisResult& result) {
  std::vector<TrialOutcome> outcomes;
  outcomes.reserve(result.trials.size());
  for (const auto& t : result.trials) outcomes.push_back(t.outcome());
  result.summary = aggregate(outcomes);
}

AnalysisResult analyze(const Dataset& data, const PipelineConfig& cfg) {
  validate(cfg);
  AnalysisResult result;
  result.config = cfg;
  result.input_count = data.input_count();
  result.exclusions = data.exclusions;

  const std::set<std::string> manual(cfg.exclude_trials.begin(), cfg.exclude_trials.end());
  std::vector<const HandoverTrial*> work;
  for (const auto& t : data.trials) {
    if (manual.count(t.trial_id) != 0) {
      result.exclusions.push_back({t.trial_id, ErrorCode::ValidationError,
                                   "excluded by configuration"});
    } else {
      work.push_back(&t);
    }
  }

  // Each worker writes only its own slots, so the merge below is independent
  // of scheduling.
  std::vector<std::optional<TrialReport>> reports(work.size());
  std::vector<std::optional<Exclusion>> failures(work.size());
  auto run = [&](std::size_t i) {
    try {
      reports[i] = analyze_trial(*work[i], cfg);
    } catch (const Error& e) {
      failures[i] = Exclusion{work[i]->trial_id, e.code(), e.what()};
    } catch (const std::exception& e) {
      failures[i] = Exclusion{work[i]->trial_id, ErrorCode::ValidationError, e.what()};
    }
  };
  const std::size_t jobs = std::min<std::size_t>(cfg.jobs, std::max<std::size_t>(work.size(), 1));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < work.size(); ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < work.size(); i += jobs) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < work.size(); ++i) {
    if (reports[i]) result.trials.push_back(std::move(*reports[i]));
    if (failures[i]) result.exclusions.push_back(std::move(*failures[i]));
  }
  std::stable_sort(result.trials.begin(), result.trials.end(),
                   [](const auto& a, const auto& b) { return a.trial_id < b.trial_id; });
  std::stable_sort(result.exclusions.begin(), result.exclusions.end(),
                   [](const auto& a, const auto& b) { return a.trial_id < b.trial_id; });
  summarize(result);
  return result;
}

}  // namespace reachfit
