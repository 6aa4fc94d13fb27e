#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "reachfit/models.hpp"
#include "reachfit/signal.hpp"

namespace reachfit {

enum class ReachKind { Ellipse, Hyperbola, MinJerk, DecoupledMinJerk };
const char* to_string(ReachKind k);

// One synthetic handover. Conic arcs live in the reach plane, whose u axis is
// horizontal with heading `plane_yaw` and whose v axis is world up tilted by
// `plane_tilt` about u; the plane frame sits at `plane_origin` and the conic
// centre at `conic_center` in plane coordinates. Hyperbolic arcs use
// center + R(inclination) (a cosh w, b sinh w). Straight and DMJ reaches run
// from plane point (-chord/2, 0) to (chord/2, 0) raised by `rise_mm` in world
// z; DMJ decouples world z.
struct SynthSpec {
  ReachKind kind = ReachKind::Ellipse;
  double semi_a = 250.0;
  double semi_b = 120.0;
  double inclination = 0.0;
  Point2 conic_center = Point2::Zero();
  // Ellipse angle or hyperbola parameter at the start and end of the reach.
  double arc_start = 2.792526803190927;  // 160 degrees
  double arc_end = 0.3490658503988659;   // 20 degrees
  double chord_mm = 450.0;
  double rise_mm = 200.0;
  double dmj_ratio = 0.5;

  double plane_yaw = 0.0;
  double plane_tilt = 0.3;
  Point3 plane_origin{300.0, 0.0, 950.0};

  double rate_hz = 100.0;
  double noise_mm = 0.0;
  double reach_duration_s = 1.0;
  ReachCase preamble = ReachCase::Case1;
  std::uint64_t seed = 1;
  std::string trial_id = "synth-0000";
};

void validate(const SynthSpec& spec);

struct SynthTruth {
  std::string trial_id;
  ReachKind kind = ReachKind::Ellipse;
  ReachCase case_label = ReachCase::Case1;
  double t_ogc = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t start_index = 0;
  std::size_t end_index = 0;
  PlaneFrame reach_frame;       // frame of the generating plane
  ConicCoeffs conic_mm = ConicCoeffs::Zero();  // in reach_frame coordinates
  double dmj_ratio = 1.0;
  Point3 reach_start = Point3::Zero();
  Point3 reach_end = Point3::Zero();
};

struct SynthTrial {
  HandoverTrial trial;
  SynthTruth truth;
  // Noise-free object samples for [t_start, t_end].
  Trajectory clean_reach;
};

SynthTrial generate_trial(const SynthSpec& spec);

// Frame of the generating plane for `spec`.
PlaneFrame synth_reach_frame(const SynthSpec& spec);

// Draws per-trial specs from a mixture of reach kinds with jittered shapes.
struct DatasetSpec {
  SynthSpec base;
  // All weights zero means every trial uses `base.kind`.
  double weight_ellipse = 0.0;
  double weight_hyperbola = 0.0;
  double weight_min_jerk = 0.0;
  double weight_dmj = 0.0;
  // Negative means every trial uses `base.preamble`.
  double case2_fraction = -1.0;
  bool jitter = false;
  // Exact proportions by index instead of independent draws.
  bool stratified = false;
};

SynthSpec sample_spec(const DatasetSpec& dataset, std::size_t index);

// Flat key=value format shared with the CLI.
DatasetSpec parse_dataset_spec(std::istream& in);
DatasetSpec load_dataset_spec(const std::string& path);

void write_truth_csv(std::ostream& out, const std::vector<SynthTruth>& truth);

}  // namespace reachfit
