#include "reachfit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "reachfit/error.hpp"

namespace reachfit {

namespace {

FitError finish(std::vector<double> distances) {
  FitError e;
  e.per_point_mm = std::move(distances);
  e.mean_mm = std::accumulate(e.per_point_mm.begin(), e.per_point_mm.end(), 0.0) /
              static_cast<double>(e.per_point_mm.size());
  return e;
}

void require_points(std::size_t n) {
  if (n == 0) fail(ErrorCode::TooShort, "error needs at least one point");
}

// Real roots of a t^2 + b t + c = 0 lying in [lo, hi].
void push_roots(double a, double b, double c, double lo, double hi,
                std::vector<double>& out) {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0.0) return;
  if (std::abs(a) <= 1e-14 * scale) {
    if (std::abs(b) > 1e-14 * scale) {
      const double r = -c / b;
      if (r >= lo && r <= hi) out.push_back(r);
    }
    return;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return;
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  for (double r : {q / a, q != 0.0 ? c / q : q / a}) {
    if (r >= lo && r <= hi) out.push_back(r);
  }
}

double direction_angle(const Point2& from, const Point2& to) {
  const double a = std::atan2(to.y() - from.y(), to.x() - from.x());
  return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

}  // namespace

Point3 closest_point_on_line(const Point3& p, const Point3& p1, const Point3& p2) {
  const Eigen::Vector3d d = p2 - p1;
  const double len2 = d.squaredNorm();
  if (!(len2 > 0.0)) fail(ErrorCode::DegenerateLine, "line end points coincide");
  return p1 - d * ((p1 - p).dot(d) / len2);
}

ConicProjector::ConicProjector(const ConicModel& model, const Box2& search_box,
                               int lines_per_axis)
    : k_(model.coeffs), norm_(model.normalization) {
  const Point2 lo = norm_.apply(search_box.min);
  const Point2 hi = norm_.apply(search_box.max);
  const double A = k_[0], B = k_[1], C = k_[2], D = k_[3], E = k_[4], F = k_[5];
  const int n = std::max(lines_per_axis, 2);
  const double dx = (hi.x() - lo.x()) / (n - 1);
  const double dy = (hi.y() - lo.y()) / (n - 1);
  spacing_ = std::max(dx, dy);

  std::vector<double> roots;
  for (int i = 0; i < n; ++i) {
    const double x = lo.x() + dx * i;
    roots.clear();
    push_roots(C, B * x + E, A * x * x + D * x + F, lo.y(), hi.y(), roots);
    for (double y : roots) seeds_.emplace_back(x, y);
  }
  for (int i = 0; i < n; ++i) {
    const double y = lo.y() + dy * i;
    roots.clear();
    push_roots(A, B * y + D, C * y * y + E * y + F, lo.x(), hi.x(), roots);
    for (double x : roots) seeds_.emplace_back(x, y);
  }
}

double ConicProjector::value(const Point2& q) const {
  const double x = q.x(), y = q.y();
  return k_[0] * x * x + k_[1] * x * y + k_[2] * y * y + k_[3] * x + k_[4] * y + k_[5];
}

Eigen::Vector2d ConicProjector::gradient(const Point2& q) const {
  return {2.0 * k_[0] * q.x() + k_[1] * q.y() + k_[3],
          k_[1] * q.x() + 2.0 * k_[2] * q.y() + k_[4]};
}

Point2 ConicProjector::refine(const Point2& p, const Point2& seed) const {
  // Newton on q - p = lambda * grad f(q), f(q) = 0.
  Point2 q = seed;
  Eigen::Vector2d g = gradient(q);
  double lambda = g.squaredNorm() > 0.0 ? (q - p).dot(g) / g.squaredNorm() : 0.0;
  const double max_step = 4.0 * spacing_;
  for (int iter = 0; iter < 60; ++iter) {
    g = gradient(q);
    Eigen::Vector3d residual;
    residual << q - p - lambda * g, value(q);
    Eigen::Matrix3d jac;
    jac << 1.0 - 2.0 * lambda * k_[0], -lambda * k_[1], -g.x(),
        -lambda * k_[1], 1.0 - 2.0 * lambda * k_[2], -g.y(),
        g.x(), g.y(), 0.0;
    Eigen::Vector3d step = jac.fullPivLu().solve(-residual);
    if (!step.allFinite()) break;
    const double len = step.head<2>().norm();
    if (len > max_step) step *= max_step / len;
    q += step.head<2>();
    lambda += step[2];
    if (step.head<2>().norm() < 1e-15) break;
  }

  const auto on_curve = [&](const Point2& c) {
    const Eigen::Vector2d gc = gradient(c);
    return gc.norm() > 0.0 && std::abs(value(c)) / gc.norm() < 1e-11;
  };
  if (q.allFinite() && on_curve(q) && (q - seed).norm() < 10.0 * spacing_ &&
      (q - p).norm() <= (seed - p).norm() + 1e-12) {
    return q;
  }

  // Foot-point iteration: alternate projection onto the curve with a step
  // along the tangent towards p.
  q = seed;
  for (int iter = 0; iter < 500; ++iter) {
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector2d gk = gradient(q);
      if (gk.squaredNorm() == 0.0) break;
      q -= value(q) * gk / gk.squaredNorm();
    }
    const Eigen::Vector2d gk = gradient(q);
    if (gk.squaredNorm() == 0.0) break;
    const Eigen::Vector2d tangent = Eigen::Vector2d(-gk.y(), gk.x()).normalized();
    const double move = (p - q).dot(tangent);
    q += move * tangent;
    if (std::abs(move) < 1e-15) break;
  }
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector2d gk = gradient(q);
    if (gk.squaredNorm() == 0.0) break;
    q -= value(q) * gk / gk.squaredNorm();
  }
  return (q - p).norm() <= (seed - p).norm() ? q : seed;
}

Point2 ConicProjector::closest(const Point2& p_mm) const {
  if (seeds_.empty()) {
    fail(ErrorCode::NoConicPointInRange, "conic has no real points in the search box");
  }
  const Point2 p = norm_.apply(p_mm);
  std::vector<double> dist(seeds_.size());
  for (std::size_t i = 0; i < seeds_.size(); ++i) dist[i] = (seeds_[i] - p).norm();
  // Only seeds near the nearest one matter below, so sort just those.
  const double reach = *std::min_element(dist.begin(), dist.end()) + 2.0 * spacing_;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < seeds_.size(); ++i) {
    if (dist[i] <= reach) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  });

  // Seeds that could belong to the basin of the global minimum, kept apart so
  // refinement effort covers distinct local minima.
  std::vector<Point2> picked;
  for (std::size_t idx : order) {
    if (dist[idx] > reach || picked.size() >= 8) break;
    const bool separate = std::all_of(picked.begin(), picked.end(), [&](const Point2& s) {
      return (s - seeds_[idx]).norm() > 2.0 * spacing_;
    });
    if (separate) picked.push_back(seeds_[idx]);
  }

  Point2 best = refine(p, picked.front());
  double best_d = (best - p).norm();
  for (std::size_t i = 1; i < picked.size(); ++i) {
    const Point2 q = refine(p, picked[i]);
    const double d = (q - p).norm();
    const double tie = 1e-12 * std::max(1.0, best_d);
    if (d < best_d - tie ||
        (std::abs(d - best_d) <= tie && direction_angle(p, q) < direction_angle(p, best))) {
      best = q;
      best_d = d;
    }
  }
  // A whole arc can be equidistant (p at a circle centre); the picked seeds
  // then need not contain the smallest angle, so scan every seed.
  const double tie = 1e-9 * std::max(1.0, best_d);
  for (std::size_t idx : order) {
    if (dist[idx] > best_d + tie) break;
    if (std::abs(dist[idx] - best_d) <= tie &&
        direction_angle(p, seeds_[idx]) < direction_angle(p, best)) {
      const Point2 q = refine(p, seeds_[idx]);
      if (std::abs((q - p).norm() - best_d) <= tie) best = q;
    }
  }
  return norm_.invert(best);
}

Point2 closest_point_on_conic(const Point2& p, const ConicModel& model,
                              const Box2& search_box) {
  return ConicProjector(model, search_box).closest(p);
}

Point2 closest_point_on_conic(const Point2& p, const ConicModel& model) {
  if (model.domain) return closest_point_on_conic(p, model, *model.domain);
  const Point2 c = model.normalization.center;
  const double half = 4.0 * std::max((p - c).norm(), 1.0 / model.normalization.scale);
  return closest_point_on_conic(p, model,
                                Box2{c - Point2(half, half), c + Point2(half, half)});
}

Point2 closest_point_on_sampled_curve(const Point2& p, std::span<const Point2> curve) {
  if (curve.size() < 2) fail(ErrorCode::TooShort, "sampled curve needs at least 2 points");
  Point2 best = curve.front();
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const Point2& a = curve[i];
    const Eigen::Vector2d d = curve[i + 1] - a;
    const double len2 = d.squaredNorm();
    const double s = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    const Point2 q = a + s * d;
    const double d2 = (p - q).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = q;
    }
  }
  return best;
}

FitError path_error(std::span<const Point3> points, const MinJerkModel& model) {
  require_points(points.size());
  std::vector<double> d;
  d.reserve(points.size());
  for (const auto& p : points) {
    d.push_back((p - closest_point_on_line(p, model.start_point(), model.end_point())).norm());
  }
  return finish(std::move(d));
}

FitError path_error(std::span<const Point3> points, const ConicModel& model,
                    ErrorMode mode) {
  require_points(points.size());
  const ProjectedPoints proj = project_to_plane(points, model.frame);
  const Box2 box = model.domain ? *model.domain : Box2::bounding(proj.points).inflated(2.0);
  const ConicProjector projector(model, box);
  std::vector<double> d;
  d.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point2 q = projector.closest(proj.points[i]);
    d.push_back(mode == ErrorMode::Full3D
                    ? (points[i] - lift_from_plane(q, model.frame)).norm()
                    : (proj.points[i] - q).norm());
  }
  return finish(std::move(d));
}

FitError path_error(std::span<const Point3> points, const DecoupledMinJerkModel& model,
                    ErrorMode mode, std::size_t curve_samples) {
  require_points(points.size());
  const std::vector<Point3> curve3 = model.sample_path(std::max<std::size_t>(curve_samples, 2));
  const std::vector<Point2> curve = project_to_plane(curve3, model.frame).points;
  const ProjectedPoints proj = project_to_plane(points, model.frame);
  std::vector<double> d;
  d.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point2 q = closest_point_on_sampled_curve(proj.points[i], curve);
    d.push_back(mode == ErrorMode::Full3D
                    ? (points[i] - lift_from_plane(q, model.frame)).norm()
                    : (proj.points[i] - q).norm());
  }
  return finish(std::move(d));
}

FitError temporal_error(const Trajectory& points, const MinJerkModel& model) {
  require_points(points.size());
  std::vector<double> d;
  d.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const MotionState s = eval_min_jerk(model, points.timestamps[i] - model.start_time);
    d.push_back((points.positions[i] - s.position).norm());
  }
  return finish(std::move(d));
}

FitError temporal_error(const Trajectory& points, const DecoupledMinJerkModel& model) {
  require_points(points.size());
  std::vector<double> d;
  d.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point3 q = eval_decoupled_min_jerk(model, points.timestamps[i] - model.start_time);
    d.push_back((points.positions[i] - q).norm());
  }
  return finish(std::move(d));
}

}  // namespace reachfit
