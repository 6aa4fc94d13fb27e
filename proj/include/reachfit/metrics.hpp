#pragma once

#include <span>
#include <variant>
#include <vector>

#include "reachfit/models.hpp"

namespace reachfit {

struct FitError {
  double mean_mm = 0.0;
  std::vector<double> per_point_mm;

  std::size_t n_points() const { return per_point_mm.size(); }
};

// Full3D measures the distance to the lifted correspondent point, so the
// out-of-plane residual counts. PlaneOnly keeps the in-plane distance alone.
enum class ErrorMode { Full3D, PlaneOnly };

// Unclamped orthogonal projection onto the line through p1 and p2.
Point3 closest_point_on_line(const Point3& p, const Point3& p1, const Point3& p2);

// Closest point of the conic's zero set inside `search_box` (plane
// coordinates). Seeds come from intersecting the conic with 1024 vertical and
// 1024 horizontal lines spanning the box; the best seeds are refined with
// Newton's method on the Lagrange conditions. Equidistant answers resolve to
// the smallest direction angle seen from `p`.
class ConicProjector {
 public:
  ConicProjector(const ConicModel& model, const Box2& search_box,
                 int lines_per_axis = 1024);

  // Throws NoConicPointInRange when the conic misses the search box.
  Point2 closest(const Point2& p) const;

  std::size_t seed_count() const { return seeds_.size(); }

 private:
  Point2 refine(const Point2& p, const Point2& seed) const;
  double value(const Point2& q) const;
  Eigen::Vector2d gradient(const Point2& q) const;

  ConicCoeffs k_;
  ConicNormalization norm_;
  std::vector<Point2> seeds_;  // conditioned coordinates
  double spacing_ = 0.0;
};

Point2 closest_point_on_conic(const Point2& p, const ConicModel& model,
                              const Box2& search_box);
// Searches `model.domain`, or a box around `p` and the conic when unset.
Point2 closest_point_on_conic(const Point2& p, const ConicModel& model);

// Nearest point over all polyline segments; earliest segment wins ties.
Point2 closest_point_on_sampled_curve(const Point2& p, std::span<const Point2> curve);

FitError path_error(std::span<const Point3> points, const MinJerkModel& model);
FitError path_error(std::span<const Point3> points, const ConicModel& model,
                    ErrorMode mode = ErrorMode::Full3D);
FitError path_error(std::span<const Point3> points, const DecoupledMinJerkModel& model,
                    ErrorMode mode = ErrorMode::Full3D,
                    std::size_t curve_samples = 4096);

// Correspondence by time: each sample is compared with the model evaluated at
// (sample time - model start time). Throws OutOfRange outside the model span.
FitError temporal_error(const Trajectory& points, const MinJerkModel& model);
FitError temporal_error(const Trajectory& points, const DecoupledMinJerkModel& model);

}  // namespace reachfit
