#include <doctest.h>

#include <numbers>

#include "reachfit/error.hpp"
#include "reachfit/metrics.hpp"
#include "support.hpp"

using namespace reachfit;

namespace {

// Nearest of a million samples of a parametric curve.
double brute_force_distance(const Point2& p, const std::function<Point2(double)>& curve,
                            double from, double to) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 1000000; ++i) {
    best = std::min(best, (curve(from + (to - from) * i / 1e6) - p).norm());
  }
  return best;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("closest_point_on_line") {
  const Point3 q = closest_point_on_line(Point3(5, 7, 0), Point3(0, 0, 0), Point3(10, 0, 0));
  CHECK((q - Point3(5, 0, 0)).norm() < 1e-12);
  const Point3 beyond = closest_point_on_line(Point3(20, 1, 1), Point3(0, 0, 0), Point3(10, 0, 0));
  CHECK((beyond - Point3(20, 0, 0)).norm() < 1e-12);
  try {
    closest_point_on_line(Point3(1, 1, 1), Point3(2, 2, 2), Point3(2, 2, 2));
    FAIL("expected DegenerateLine");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateLine);
  }
}

TEST_CASE("closest point on an ellipse agrees with dense sampling") {
  const double a = 220.0, b = 90.0, theta = 0.35;
  const Point2 c(40.0, -25.0);
  const ConicModel m = make_conic(ellipse_to_conic({c, a, b, theta}));
  auto curve = [&](double u) {
    return Point2(c + Eigen::Rotation2Dd(theta) * Point2(a * std::cos(u), b * std::sin(u)));
  };
  const Box2 box{Point2(-400, -400), Point2(400, 400)};
  std::mt19937_64 rng(21);
  double worst = 0.0;
  for (int i = 0; i < 12; ++i) {
    const Point2 p(test::uniform(rng, -300, 300), test::uniform(rng, -200, 200));
    const Point2 q = closest_point_on_conic(p, m, box);
    const double oracle = brute_force_distance(p, curve, 0.0, 2 * std::numbers::pi);
    worst = std::max(worst, std::abs((p - q).norm() - oracle));
    const Point2 local = Eigen::Rotation2Dd(-theta) * (q - c);
    CHECK(std::abs(std::hypot(local.x() / a, local.y() / b) - 1.0) < 1e-9);
  }
  MESSAGE("worst distance discrepancy (mm): " << worst);
  CHECK(worst < 1e-3);
}

TEST_CASE("closest point on a hyperbola agrees with dense sampling") {
  ConicCoeffs k;  // x^2/100^2 - y^2/60^2 = 1
  k << 1e-4, 0, -1.0 / 3600.0, 0, 0, -1;
  const ConicModel m = make_conic(k);
  const Box2 box{Point2(-500, -500), Point2(500, 500)};
  auto right = [](double w) { return Point2(100 * std::cosh(w), 60 * std::sinh(w)); };
  auto left = [](double w) { return Point2(-100 * std::cosh(w), 60 * std::sinh(w)); };
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const Point2 p(test::uniform(rng, -300, 300), test::uniform(rng, -300, 300));
    const Point2 q = closest_point_on_conic(p, m, box);
    const double oracle = std::min(brute_force_distance(p, right, -2.5, 2.5),
                                   brute_force_distance(p, left, -2.5, 2.5));
    CAPTURE(p.transpose());
    CHECK(std::abs((p - q).norm() - oracle) < 1e-3);
  }
}

TEST_CASE("closest_point_on_conic outside the search box") {
  ConicCoeffs k;
  k << 1, 0, 1, 0, 0, -100;
  const ConicModel m = make_conic(k);
  try {
    closest_point_on_conic(Point2(500, 500), m, Box2{Point2(400, 400), Point2(600, 600)});
    FAIL("expected NoConicPointInRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoConicPointInRange);
  }
  // Default box still finds the circle.
  CHECK((closest_point_on_conic(Point2(30, 0), m) - Point2(10, 0)).norm() < 1e-9);
}

TEST_CASE("equidistant conic points resolve to the smallest direction angle") {
  ConicCoeffs k;
  k << 1, 0, 1, 0, 0, -100;
  const ConicModel m = make_conic(k);
  // From the centre every point is 10 mm away. The answer is the seed with the
  // smallest angle, so it sits within one seed spacing (40 / 1023 mm) of angle 0.
  const Point2 q = closest_point_on_conic(Point2(0, 0), m, Box2{Point2(-20, -20), Point2(20, 20)});
  CHECK(q.norm() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(q.y() >= 0.0);
  CHECK(std::atan2(q.y(), q.x()) * 10.0 < 40.0 / 1023.0);
}

TEST_CASE("closest_point_on_sampled_curve") {
  const std::vector<Point2> curve = {Point2(0, 0), Point2(10, 0), Point2(10, 10)};
  CHECK((closest_point_on_sampled_curve(Point2(5, 3), curve) - Point2(5, 0)).norm() < 1e-12);
  CHECK((closest_point_on_sampled_curve(Point2(12, 4), curve) - Point2(10, 4)).norm() < 1e-12);
  // Equally far from both segments: the earlier one wins.
  CHECK((closest_point_on_sampled_curve(Point2(7, 3), curve) - Point2(7, 0)).norm() < 1e-12);
  CHECK_THROWS_AS(closest_point_on_sampled_curve(Point2(0, 0), std::span(curve).first(1)), Error);
}

TEST_CASE("path_error for minimum jerk is the distance to the chord") {
  MinJerkModel m = solve_min_jerk({{Point3(0, 0, 0)}, {Point3(100, 0, 0)}}, 1.0);
  const std::vector<Point3> pts = {Point3(10, 3, 4), Point3(50, 0, 2), Point3(150, 0, -1)};
  const FitError e = path_error(pts, m);
  CHECK(e.per_point_mm[0] == doctest::Approx(5.0));
  CHECK(e.per_point_mm[1] == doctest::Approx(2.0));
  CHECK(e.per_point_mm[2] == doctest::Approx(1.0));
  CHECK(e.mean_mm == doctest::Approx(8.0 / 3.0));
  CHECK(e.n_points() == 3);
  CHECK_THROWS_AS(path_error(std::span<const Point3>{}, m), Error);
}

TEST_CASE("conic path_error counts the out-of-plane offset only in 3D mode") {
  const PlaneFrame f = plane_frame(Plane{Point3(100, 50, 900), Eigen::Vector3d(0.2, -0.5, 1).normalized()});
  ConicModel m = make_conic(ellipse_to_conic({Point2::Zero(), 200, 100, 0.0}), f);
  const Eigen::Vector3d n = f.rotation.row(2).transpose();
  std::vector<Point3> pts;
  for (int i = 0; i < 20; ++i) {
    const double u = 0.3 + 0.12 * i;
    pts.push_back(f.to_world(Point3(200 * std::cos(u), 100 * std::sin(u), 0)) + 2.5 * n);
  }
  const FitError full = path_error(pts, m, ErrorMode::Full3D);
  const FitError flat = path_error(pts, m, ErrorMode::PlaneOnly);
  CHECK(full.mean_mm == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(flat.mean_mm < 1e-9);
}

TEST_CASE("DMJ errors vanish on the model's own samples") {
  const Point3 a(0, 0, 900), b(300, 100, 1100);
  const auto m = make_decoupled_min_jerk(a, b, 1.0, 0.6, decoupling_axes(a, Eigen::Vector3d::UnitZ()),
                                         plane_frame(Plane{a, Eigen::Vector3d(-1, 3, 0).normalized()}), 4.0);
  Trajectory traj;
  for (int i = 0; i <= 100; ++i) {
    traj.timestamps.push_back(4.0 + 0.01 * i);
    traj.positions.push_back(m.position(0.01 * i));
  }
  CHECK(temporal_error(traj, m).mean_mm < 1e-12);
  CHECK(path_error(traj.positions, m).mean_mm < 0.05);

  MinJerkModel mj = solve_min_jerk({{a}, {b}}, 1.0);
  mj.start_time = 4.0;
  const FitError te = temporal_error(traj, mj);
  std::vector<double> direct;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    direct.push_back((traj.positions[i] - eval_min_jerk(mj, 0.01 * static_cast<double>(i)).position).norm());
  }
  CHECK(te.mean_mm == doctest::Approx(mean(direct)));
  traj.timestamps.back() += 0.5;
  CHECK_THROWS_AS(temporal_error(traj, mj), Error);
}
