#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reachfit/geometry.hpp"

namespace reachfit {

// Time-stamped marker positions (seconds, millimetres).
struct Trajectory {
  std::vector<double> timestamps;
  std::vector<Point3> positions;

  std::size_t size() const { return timestamps.size(); }
  bool empty() const { return timestamps.empty(); }
  double start_time() const { return timestamps.front(); }
  double end_time() const { return timestamps.back(); }
  double duration() const { return end_time() - start_time(); }

  // Mean sampling step; only meaningful for uniformly sampled data.
  double step() const;

  // Samples with index in [first, last].
  Trajectory slice(std::size_t first, std::size_t last) const;
  Trajectory select(const std::vector<bool>& mask) const;
};

// Throws BadSampling unless there are at least two samples, all finite, with
// every step within 1% of the mean step.
void validate_uniform(const Trajectory& traj);

struct SpeedProfile {
  std::vector<double> timestamps;
  std::vector<double> speeds;  // mm/s
};

struct HandoverTrial {
  std::string trial_id;
  Trajectory giver_hand;
  Trajectory receiver_hand;
  Trajectory object;
};

enum class ReachCase { Case1, Case2 };
const char* to_string(ReachCase c);

// Where the inlier band's standard deviation comes from: the out-of-plane
// residuals of every segment sample, or only those inside the window.
enum class SigmaSource { Segment, Window };

struct InlierConfig {
  double delta_pct = 20.0;  // window size, percent of segment length
  double delta_mm = 5.0;    // drop below the vertical peak that anchors the window
  double sigma_k = 3.0;     // inlier band in residual standard deviations
  SigmaSource sigma_source = SigmaSource::Segment;
};

void validate(const InlierConfig& cfg);

enum class SegmentMarker { Object, GiverHand };

struct SegmentConfig {
  double cutoff_hz = 10.0;  // 0 disables the low-pass stage
  int filter_order = 4;
  InlierConfig inlier;
  SegmentMarker marker = SegmentMarker::Object;
};

struct InlierResult {
  std::vector<bool> mask;
  Plane plane;
};

struct SegmentedReach {
  double t_ogc = 0.0;
  double t_rgc = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  ReachCase case_label = ReachCase::Case1;
  Trajectory segment;
  std::vector<bool> inlier_mask;
  Plane plane;

  std::size_t inlier_count() const;
  Trajectory inliers() const { return segment.select(inlier_mask); }
};

// Per-axis zero-phase Butterworth low-pass (cascaded second-order sections run
// forward then backward with odd-reflection padding and steady-state initial
// conditions). Throws BadSampling / BadCutoff.
Trajectory lowpass_filter(const Trajectory& traj, double cutoff_hz = 10.0,
                          int order = 4);

// Central differences inside, one-sided at the ends. Throws TooShort below 3
// samples.
SpeedProfile speed_profile(const Trajectory& traj);

// Time of the minimum of |a(t) - b(t)| over the optional closed window; the
// earliest sample wins ties.
double min_distance_time(const Trajectory& a, const Trajectory& b,
                         std::optional<std::pair<double, double>> window = {});

struct ReachStart {
  double t_start = 0.0;
  ReachCase case_label = ReachCase::Case1;
};

ReachStart detect_reach_start(const SpeedProfile& speed, double t_ogc,
                              double t_rgc);

InlierResult inlier_filter(const Trajectory& segment, const InlierConfig& cfg);

SegmentedReach segment_trial(const HandoverTrial& trial,
                             const SegmentConfig& cfg = {});

}  // namespace reachfit
