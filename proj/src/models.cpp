#include "reachfit/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "reachfit/error.hpp"
#include "reachfit/metrics.hpp"

namespace reachfit {

const char* to_string(ConicClass c) {
  switch (c) {
    case ConicClass::Ellipse: return "ellipse";
    case ConicClass::Hyperbola: return "hyperbola";
    case ConicClass::Parabola: return "parabola";
  }
  return "?";
}

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Conic: return "conic";
    case ModelKind::DecoupledMinJerk: return "dmj";
    case ModelKind::MinJerk: return "mj";
  }
  return "?";
}

Box2 Box2::bounding(std::span<const Point2> points) {
  Box2 box{points.front(), points.front()};
  for (const auto& p : points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

Box2 Box2::inflated(double factor) const {
  const Point2 center = 0.5 * (min + max);
  const Point2 half = 0.5 * factor * (max - min);
  return {center - half, center + half};
}

ConicCoeffs canonical_coefficients(const ConicCoeffs& c) {
  ConicCoeffs out = c.normalized();
  for (int i = 0; i < 6; ++i) {
    if (std::abs(out[i]) > 1e-12) {
      if (out[i] < 0.0) out = -out;
      break;
    }
  }
  return out;
}

ConicCoeffs condition_coefficients(const ConicCoeffs& k, const ConicNormalization& n) {
  const double cx = n.center.x(), cy = n.center.y(), s = n.scale;
  const double A = k[0], B = k[1], C = k[2], D = k[3], E = k[4], F = k[5];
  ConicCoeffs out;
  out << A / (s * s), B / (s * s), C / (s * s), (2 * A * cx + B * cy + D) / s,
      (B * cx + 2 * C * cy + E) / s,
      A * cx * cx + B * cx * cy + C * cy * cy + D * cx + E * cy + F;
  return out;
}

ConicCoeffs ConicModel::coefficients_mm() const {
  const double cx = normalization.center.x(), cy = normalization.center.y();
  const double s2 = normalization.scale * normalization.scale;
  const double s = normalization.scale;
  const double A = coeffs[0] * s2, B = coeffs[1] * s2, C = coeffs[2] * s2;
  const double D = coeffs[3] * s, E = coeffs[4] * s;
  ConicCoeffs out;
  out << A, B, C, -2 * A * cx - B * cy + D, -B * cx - 2 * C * cy + E,
      A * cx * cx + B * cx * cy + C * cy * cy - D * cx - E * cy + coeffs[5];
  return canonical_coefficients(out);
}

ConicModel make_conic(const ConicCoeffs& coeffs_mm, const PlaneFrame& frame) {
  ConicModel m;
  m.coeffs = canonical_coefficients(coeffs_mm);
  m.frame = frame;
  return m;
}

ConicModel fit_conic(std::span<const Point2> points) {
  const std::size_t n = points.size();
  if (n < 6) fail(ErrorCode::DegenerateInput, "conic fit needs at least 6 points");

  Point2 centroid = Point2::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(n);
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const auto& p : points) scatter += (p - centroid) * (p - centroid).transpose();
  const Eigen::Vector2d eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(scatter).eigenvalues();
  // Singular value ratio of the centred points, as for the plane fit.
  if (!(eig[1] > 0.0) || std::sqrt(std::max(eig[0], 0.0) / eig[1]) < 1e-6) {
    fail(ErrorCode::DegenerateInput, "conic fit points are collinear");
  }
  const double rms_radius = std::sqrt(scatter.trace() / static_cast<double>(n));

  ConicModel model;
  model.normalization = {centroid, std::numbers::sqrt2 / rms_radius};
  Eigen::MatrixXd design(n, 6);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 q = model.normalization.apply(points[i]);
    design.row(static_cast<Eigen::Index>(i)) << q.x() * q.x(), q.x() * q.y(),
        q.y() * q.y(), q.x(), q.y(), 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
  model.coeffs = canonical_coefficients(svd.matrixV().col(5));
  model.domain = Box2::bounding(points).inflated(2.0);
  return model;
}

double conic_discriminant(const ConicModel& model) {
  const auto& c = model.coeffs;
  return c[1] * c[1] - 4.0 * c[0] * c[2];
}

ConicClass classify_conic(const ConicModel& model, double tol) {
  const double d = conic_discriminant(model);
  if (d < -tol) return ConicClass::Ellipse;
  if (d > tol) return ConicClass::Hyperbola;
  return ConicClass::Parabola;
}

bool is_circle(const ConicModel& model, double tol) {
  const auto& c = model.coeffs;
  return classify_conic(model, tol) == ConicClass::Ellipse &&
         std::abs(c[0] - c[2]) <= tol && std::abs(c[1]) <= tol;
}

EllipseParams conic_to_ellipse_params(const ConicModel& model) {
  const auto& c = model.coeffs;
  const double A = c[0], B = c[1], C = c[2], D = c[3], E = c[4], F = c[5];
  if (!(B * B - 4.0 * A * C < 0.0)) {
    fail(ErrorCode::NotAnEllipse, "discriminant is not negative");
  }
  Eigen::Matrix2d grad;
  grad << 2 * A, B, B, 2 * C;
  const Eigen::Vector2d center = grad.inverse() * Eigen::Vector2d(-D, -E);
  double f0 = F + 0.5 * (D * center.x() + E * center.y());

  Eigen::Matrix2d quad;
  quad << A, 0.5 * B, 0.5 * B, C;
  if (quad.trace() < 0.0) {
    quad = -quad;
    f0 = -f0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(quad);
  const Eigen::Vector2d lambda = es.eigenvalues();
  if (!(-f0 / lambda[0] > 0.0) || !(-f0 / lambda[1] > 0.0)) {
    fail(ErrorCode::NotAnEllipse, "conic has no real points");
  }

  EllipseParams out;
  const double s = model.normalization.scale;
  out.center = model.normalization.invert(center);
  out.semi_major = std::sqrt(-f0 / lambda[0]) / s;
  out.semi_minor = std::sqrt(-f0 / lambda[1]) / s;
  if (lambda[1] - lambda[0] <= 1e-12 * std::abs(lambda[1])) {
    out.inclination = 0.0;
  } else {
    const Eigen::Vector2d axis = es.eigenvectors().col(0);
    double tau = std::atan2(axis.y(), axis.x());
    if (tau <= -std::numbers::pi / 2) tau += std::numbers::pi;
    if (tau > std::numbers::pi / 2) tau -= std::numbers::pi;
    out.inclination = tau;
  }
  return out;
}

ConicCoeffs ellipse_to_conic(const EllipseParams& p) {
  const double c = std::cos(p.inclination), s = std::sin(p.inclination);
  const double alpha = 1.0 / (p.semi_major * p.semi_major);
  const double beta = 1.0 / (p.semi_minor * p.semi_minor);
  const double xc = p.center.x(), yc = p.center.y();
  const double A = alpha * c * c + beta * s * s;
  const double B = 2.0 * c * s * (alpha - beta);
  const double C = alpha * s * s + beta * c * c;
  ConicCoeffs out;
  out << A, B, C, -2 * A * xc - B * yc, -B * xc - 2 * C * yc,
      A * xc * xc + B * xc * yc + C * yc * yc - 1.0;
  return canonical_coefficients(out);
}

Point2 ellipse_point(const EllipseParams& p, double theta) {
  const double c = std::cos(p.inclination), s = std::sin(p.inclination);
  const double x = p.semi_major * std::cos(theta), y = p.semi_minor * std::sin(theta);
  return p.center + Point2(c * x - s * y, s * x + c * y);
}

std::vector<Point3> generate_ellipse_path(const EllipseParams& params,
                                          std::span<const double> theta_values,
                                          const PlaneFrame& frame) {
  std::vector<Point3> out;
  out.reserve(theta_values.size());
  for (double theta : theta_values) {
    out.push_back(lift_from_plane(ellipse_point(params, theta), frame));
  }
  return out;
}

double Quintic::value(double t, int derivative) const {
  double result = 0.0;
  for (int i = 5; i >= derivative; --i) {
    double factor = 1.0;
    for (int k = 0; k < derivative; ++k) factor *= i - k;
    result = result * t + factor * coeffs[i];
  }
  return result;
}

double Quintic::clamped(double t, int derivative) const {
  if (t <= 0.0) return derivative == 0 ? coeffs[0] : 0.0;
  if (t >= duration) return derivative == 0 ? value(duration) : 0.0;
  return value(t, derivative);
}

double Quintic::jerk_cost() const {
  const std::array<double, 3> j = {6.0 * coeffs[3], 24.0 * coeffs[4], 60.0 * coeffs[5]};
  double cost = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) {
      cost += j[i] * j[k] * std::pow(duration, i + k + 1) / (i + k + 1);
    }
  }
  return cost;
}

Quintic solve_quintic(const AxisBoundary& bc, double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    fail(ErrorCode::BadDuration, "duration must be positive");
  }
  const double T = duration;
  Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 2) = 2.0;
  for (int i = 0; i < 6; ++i) {
    m(3, i) = std::pow(T, i);
    if (i >= 1) m(4, i) = i * std::pow(T, i - 1);
    if (i >= 2) m(5, i) = i * (i - 1) * std::pow(T, i - 2);
  }
  Eigen::Matrix<double, 6, 1> rhs;
  rhs << bc.p0, bc.v0, bc.a0, bc.pf, bc.vf, bc.af;
  const Eigen::Matrix<double, 6, 1> c = m.fullPivLu().solve(rhs);
  Quintic q;
  for (int i = 0; i < 6; ++i) q.coeffs[i] = c[i];
  q.duration = T;
  return q;
}

MinJerkModel solve_min_jerk(const BoundaryConditions& bc, double duration) {
  MinJerkModel m;
  m.duration = duration;
  m.boundary = bc;
  for (int a = 0; a < 3; ++a) {
    m.axes[a] = solve_quintic({bc.start.position[a], bc.start.velocity[a],
                               bc.start.acceleration[a], bc.end.position[a],
                               bc.end.velocity[a], bc.end.acceleration[a]},
                              duration);
  }
  return m;
}

MotionState eval_min_jerk(const MinJerkModel& model, double t) {
  const double slack = 1e-9 * std::max(1.0, model.duration);
  if (t < -slack || t > model.duration + slack) {
    fail(ErrorCode::OutOfRange, "time outside the model duration");
  }
  t = std::clamp(t, 0.0, model.duration);
  MotionState s;
  for (int a = 0; a < 3; ++a) {
    s.position[a] = model.axes[a].value(t, 0);
    s.velocity[a] = model.axes[a].value(t, 1);
    s.acceleration[a] = model.axes[a].value(t, 2);
    s.jerk[a] = model.axes[a].value(t, 3);
  }
  return s;
}

double jerk_cost(const MinJerkModel& model) {
  double cost = 0.0;
  for (const auto& axis : model.axes) cost += axis.jerk_cost();
  return cost;
}

double jerk_cost(const Trajectory& traj) {
  const std::size_t n = traj.size();
  if (n < 7) fail(ErrorCode::TooShort, "numeric jerk cost needs at least 7 samples");
  validate_uniform(traj);
  const double h = traj.step();
  const double h3 = h * h * h;
  const auto& p = traj.positions;
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector3d j;
    if (i < 2) {
      j = (p[i + 3] - 3.0 * p[i + 2] + 3.0 * p[i + 1] - p[i]) / h3;
    } else if (i + 2 >= n) {
      j = (p[i] - 3.0 * p[i - 1] + 3.0 * p[i - 2] - p[i - 3]) / h3;
    } else {
      j = (p[i + 2] - 2.0 * p[i + 1] + 2.0 * p[i - 1] - p[i - 2]) / (2.0 * h3);
    }
    sq[i] = j.squaredNorm();
  }
  double cost = 0.0;
  for (std::size_t i = 1; i < n; ++i) cost += 0.5 * (sq[i] + sq[i - 1]) * h;
  return cost;
}

MinJerkModel fit_min_jerk(const Trajectory& segment, BoundaryMode mode) {
  const std::size_t n = segment.size();
  if (n < 2) fail(ErrorCode::TooShort, "minimum jerk fit needs at least 2 samples");
  const auto& p = segment.positions;
  const auto& t = segment.timestamps;
  BoundaryConditions bc;
  bc.start.position = p.front();
  bc.end.position = p.back();
  if (mode == BoundaryMode::Estimated && n >= 3) {
    const double h0 = t[1] - t[0];
    const double h1 = t[n - 1] - t[n - 2];
    bc.start.velocity = (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * h0);
    bc.start.acceleration = (p[0] - 2.0 * p[1] + p[2]) / (h0 * h0);
    bc.end.velocity = (3.0 * p[n - 1] - 4.0 * p[n - 2] + p[n - 3]) / (2.0 * h1);
    bc.end.acceleration = (p[n - 1] - 2.0 * p[n - 2] + p[n - 3]) / (h1 * h1);
  }
  MinJerkModel m = solve_min_jerk(bc, segment.duration());
  m.start_time = segment.start_time();
  return m;
}

Point3 DecoupledMinJerkModel::position(double t) const {
  return axes.to_world(Point3(xy[0].clamped(t), xy[1].clamped(t), z.clamped(t)));
}

std::vector<Point3> DecoupledMinJerkModel::sample_path(std::size_t n) const {
  std::vector<Point3> out;
  out.reserve(n);
  const double T = duration();
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(position(T * static_cast<double>(i) / static_cast<double>(n - 1)));
  }
  return out;
}

DecoupledMinJerkModel make_decoupled_min_jerk(const Point3& start, const Point3& end,
                                              double t_xy, double ratio,
                                              const PlaneFrame& axes,
                                              const PlaneFrame& frame,
                                              double start_time) {
  if (!(ratio > 0.0)) fail(ErrorCode::BadDuration, "duration ratio must be positive");
  DecoupledMinJerkModel m;
  m.axes = axes;
  m.axes.origin = start;
  m.frame = frame;
  m.ratio = ratio;
  m.t_xy = t_xy;
  m.t_z = ratio * t_xy;
  m.start_time = start_time;
  const Point3 delta = m.axes.rotation * (end - start);
  m.xy[0] = solve_quintic({0, 0, 0, delta.x(), 0, 0}, m.t_xy);
  m.xy[1] = solve_quintic({0, 0, 0, delta.y(), 0, 0}, m.t_xy);
  m.z = solve_quintic({0, 0, 0, delta.z(), 0, 0}, m.t_z);
  return m;
}

Eigen::Vector3d decoupling_vertical(DecouplingAxis axis, const Plane& plane) {
  if (axis == DecouplingAxis::World) return Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d n = plane.normal.normalized();
  const Eigen::Vector3d v = Eigen::Vector3d::UnitZ() - n.z() * n;
  if (v.norm() < 1e-6) return Eigen::Vector3d::UnitZ();
  return v.normalized();
}

PlaneFrame decoupling_axes(const Point3& start, const Eigen::Vector3d& vertical) {
  return plane_frame(Plane{start, vertical});
}

DecoupledMinJerkModel fit_decoupled_min_jerk(const SegmentedReach& reach,
                                             const DmjConfig& cfg) {
  const Trajectory inliers = reach.inliers();
  if (inliers.size() < 2) fail(ErrorCode::TooShort, "DMJ fit needs at least 2 inlier samples");
  if (!(cfg.ratio_min > 0.0) || cfg.ratio_max < cfg.ratio_min || cfg.grid_points < 2) {
    fail(ErrorCode::ConfigError, "invalid DMJ ratio search bounds");
  }
  const Point3 start = inliers.positions.front();
  const Point3 end = inliers.positions.back();
  const double duration = inliers.duration();
  const PlaneFrame frame = plane_frame(reach.plane);
  const PlaneFrame axes = decoupling_axes(start, decoupling_vertical(cfg.axis, reach.plane));

  auto model_for = [&](double r) {
    return make_decoupled_min_jerk(start, end, duration, r, axes, frame,
                                   inliers.start_time());
  };
  auto objective = [&](double r) {
    return path_error(inliers.positions, model_for(r), ErrorMode::Full3D,
                      cfg.search_samples)
        .mean_mm;
  };

  // Coarse grid, scanned from the top so that flat objectives keep the larger
  // ratio, then golden-section refinement around the best grid point.
  const int g = cfg.grid_points;
  std::vector<double> grid(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) {
    grid[static_cast<std::size_t>(i)] =
        cfg.ratio_min + (cfg.ratio_max - cfg.ratio_min) * i / (g - 1);
  }
  int best = g - 1;
  double best_err = objective(grid.back());
  for (int i = g - 2; i >= 0; --i) {
    const double e = objective(grid[static_cast<std::size_t>(i)]);
    if (e < best_err) {
      best_err = e;
      best = i;
    }
  }
  double best_r = grid[static_cast<std::size_t>(best)];

  double lo = grid[static_cast<std::size_t>(std::max(best - 1, 0))];
  double hi = grid[static_cast<std::size_t>(std::min(best + 1, g - 1))];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > cfg.ratio_tolerance) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  const double refined = f1 < f2 ? x1 : x2;
  const double refined_err = std::min(f1, f2);
  if (refined_err < best_err) best_r = refined;
  return model_for(best_r);
}

Point3 eval_decoupled_min_jerk(const DecoupledMinJerkModel& model, double t) {
  const double T = model.duration();
  const double slack = 1e-9 * std::max(1.0, T);
  if (t < -slack || t > T + slack) fail(ErrorCode::OutOfRange, "time outside the model duration");
  return model.position(std::clamp(t, 0.0, T));
}

}  // namespace reachfit
