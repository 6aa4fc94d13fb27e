#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "reachfit/geometry.hpp"
#include "reachfit/signal.hpp"

namespace reachfit {

using ConicCoeffs = Eigen::Matrix<double, 6, 1>;  // A, B, C, D, E, F

enum class ConicClass { Ellipse, Hyperbola, Parabola };
const char* to_string(ConicClass c);

enum class ModelKind { Conic = 0, DecoupledMinJerk = 1, MinJerk = 2 };
const char* to_string(ModelKind k);
inline constexpr std::array<ModelKind, 3> kAllModels = {
    ModelKind::Conic, ModelKind::DecoupledMinJerk, ModelKind::MinJerk};

struct Box2 {
  Point2 min = Point2::Zero();
  Point2 max = Point2::Zero();

  static Box2 bounding(std::span<const Point2> points);
  // Same centre, every half-width multiplied by `factor`.
  Box2 inflated(double factor) const;
};

// Similarity that conditions plane coordinates before the algebraic fit:
// conditioned = scale * (p - center).
struct ConicNormalization {
  Point2 center = Point2::Zero();
  double scale = 1.0;

  Point2 apply(const Point2& p) const { return scale * (p - center); }
  Point2 invert(const Point2& q) const { return center + q / scale; }
};

// Implicit conic Ax^2 + Bxy + Cy^2 + Dx + Ey + F = 0. `coeffs` are expressed in
// the conditioned coordinates of `normalization`, unit length, first non-zero
// entry positive. Fitted models also carry the plane frame they live in and
// the region the closest-point search covers.
struct ConicModel {
  ConicCoeffs coeffs = ConicCoeffs::Zero();
  ConicNormalization normalization;
  PlaneFrame frame;
  std::optional<ConicClass> conic_class;
  std::optional<Box2> domain;

  // Coefficients in plane millimetres, unit length, canonical sign.
  ConicCoeffs coefficients_mm() const;
};

// Unit length, first entry with |c| > 1e-12 positive.
ConicCoeffs canonical_coefficients(const ConicCoeffs& c);

// Model from coefficients given directly in plane coordinates.
ConicModel make_conic(const ConicCoeffs& coeffs_mm, const PlaneFrame& frame = {});

// Expresses plane-coordinate coefficients in the conditioned coordinates of
// `n` (not normalised).
ConicCoeffs condition_coefficients(const ConicCoeffs& coeffs_mm,
                                   const ConicNormalization& n);

ConicModel fit_conic(std::span<const Point2> points);

double conic_discriminant(const ConicModel& model);
ConicClass classify_conic(const ConicModel& model, double tol = 1e-6);
bool is_circle(const ConicModel& model, double tol = 1e-6);

struct EllipseParams {
  Point2 center = Point2::Zero();
  double semi_major = 1.0;
  double semi_minor = 1.0;
  double inclination = 0.0;  // radians, (-pi/2, pi/2]
};

EllipseParams conic_to_ellipse_params(const ConicModel& model);
ConicCoeffs ellipse_to_conic(const EllipseParams& params);

Point2 ellipse_point(const EllipseParams& params, double theta);
std::vector<Point3> generate_ellipse_path(const EllipseParams& params,
                                          std::span<const double> theta_values,
                                          const PlaneFrame& frame);

// One axis of a fifth-order polynomial r(t) = sum c_i t^i over [0, duration].
struct Quintic {
  std::array<double, 6> coeffs{};
  double duration = 1.0;

  // derivative = 0..3; t is not clamped.
  double value(double t, int derivative = 0) const;
  // Holds the end value once t passes the duration, and the start value
  // before zero; derivatives vanish outside [0, duration].
  double clamped(double t, int derivative = 0) const;
  double jerk_cost() const;
};

struct AxisBoundary {
  double p0 = 0.0, v0 = 0.0, a0 = 0.0;
  double pf = 0.0, vf = 0.0, af = 0.0;
};

Quintic solve_quintic(const AxisBoundary& bc, double duration);

struct MotionState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d acceleration = Eigen::Vector3d::Zero();
  Eigen::Vector3d jerk = Eigen::Vector3d::Zero();
};

struct BoundaryConditions {
  MotionState start;
  MotionState end;
};

struct MinJerkModel {
  std::array<Quintic, 3> axes;
  double duration = 1.0;
  double start_time = 0.0;  // absolute time of model t = 0
  BoundaryConditions boundary;

  Point3 start_point() const { return boundary.start.position; }
  Point3 end_point() const { return boundary.end.position; }
};

MinJerkModel solve_min_jerk(const BoundaryConditions& bc, double duration);

// t is model time in [0, duration]; throws OutOfRange otherwise.
MotionState eval_min_jerk(const MinJerkModel& model, double t);

// Exact integral of the squared jerk magnitude over the model duration.
double jerk_cost(const MinJerkModel& model);
// Fourth-order-accurate central third difference integrated with the
// trapezoid rule over the interior samples. Throws TooShort below 7 samples.
double jerk_cost(const Trajectory& traj);

enum class BoundaryMode { RestToRest, Estimated };

MinJerkModel fit_min_jerk(const Trajectory& segment,
                          BoundaryMode mode = BoundaryMode::RestToRest);

enum class DecouplingAxis { World, PlaneVertical };

struct DmjConfig {
  double ratio_min = 0.05;
  double ratio_max = 1.0;
  int grid_points = 40;
  double ratio_tolerance = 1e-3;
  DecouplingAxis axis = DecouplingAxis::World;
  std::size_t search_samples = 1024;  // curve resolution while optimising
};

// Vertical axis motion with duration t_z = ratio * t_xy decoupled from the
// horizontal motion with duration t_xy, both rest to rest in the `axes` frame
// whose third row is the decoupled (vertical) direction and whose origin is
// the start point. `frame` is the best-fit plane used for error evaluation.
struct DecoupledMinJerkModel {
  PlaneFrame axes;
  PlaneFrame frame;
  Quintic z;
  std::array<Quintic, 2> xy;
  double t_z = 1.0;
  double t_xy = 1.0;
  double ratio = 1.0;
  double start_time = 0.0;

  double duration() const { return std::max(t_z, t_xy); }
  Point3 position(double t) const;
  // `n` points at uniform model times over [0, duration()].
  std::vector<Point3> sample_path(std::size_t n) const;
};

DecoupledMinJerkModel make_decoupled_min_jerk(const Point3& start, const Point3& end,
                                              double t_xy, double ratio,
                                              const PlaneFrame& axes,
                                              const PlaneFrame& frame,
                                              double start_time = 0.0);

// Decoupling frame for `start` with the given vertical direction.
PlaneFrame decoupling_axes(const Point3& start, const Eigen::Vector3d& vertical);
// World z, or the steepest ascent direction inside `plane` (falls back to
// world z for horizontal planes).
Eigen::Vector3d decoupling_vertical(DecouplingAxis axis, const Plane& plane);

DecoupledMinJerkModel fit_decoupled_min_jerk(const SegmentedReach& reach,
                                             const DmjConfig& cfg = {});

Point3 eval_decoupled_min_jerk(const DecoupledMinJerkModel& model, double t);

}  // namespace reachfit
