#include "reachfit/geometry.hpp"

#include <cmath>

#include "reachfit/error.hpp"

namespace reachfit {

namespace {

constexpr double kCollinearRatio = 1e-6;

}  // namespace

Eigen::Vector3d canonical_normal(const Eigen::Vector3d& n) {
  // Components below this are rounding noise (vertical planes give z ~ 1e-17).
  constexpr double kZero = 1e-12;
  for (int i : {2, 0, 1}) {
    if (n[i] > kZero) return n;
    if (n[i] < -kZero) return -n;
  }
  return n;
}

Plane fit_plane(std::span<const Point3> points) {
  if (points.size() < 3) {
    fail(ErrorCode::DegenerateInput, "plane fit needs at least 3 points");
  }
  Point3 centroid = Point3::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  Eigen::MatrixX3d centered(points.size(), 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    centered.row(static_cast<Eigen::Index>(i)) = (points[i] - centroid).transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixX3d> svd(centered, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (!(s[0] > 0.0) || s[1] / s[0] < kCollinearRatio) {
    fail(ErrorCode::DegenerateInput, "points are collinear");
  }
  Eigen::Vector3d normal = svd.matrixV().col(2).normalized();
  return Plane{centroid, canonical_normal(normal)};
}

PlaneFrame plane_frame(const Plane& plane) {
  const Eigen::Vector3d n = canonical_normal(plane.normal.normalized());
  Eigen::Vector3d u = Eigen::Vector3d::UnitX() - n.x() * n;
  if (u.norm() < 1e-9) {
    u = Eigen::Vector3d::UnitY() - n.y() * n;
  }
  u.normalize();
  const Eigen::Vector3d v = n.cross(u);

  PlaneFrame frame;
  frame.rotation.row(0) = u.transpose();
  frame.rotation.row(1) = v.transpose();
  frame.rotation.row(2) = n.transpose();
  frame.origin = plane.origin;
  return frame;
}

ProjectedPoints project_to_plane(std::span<const Point3> points,
                                 const PlaneFrame& frame) {
  ProjectedPoints out;
  out.points.reserve(points.size());
  out.residuals.reserve(points.size());
  for (const auto& p : points) {
    const Point3 q = frame.to_local(p);
    out.points.emplace_back(q.x(), q.y());
    out.residuals.push_back(q.z());
  }
  return out;
}

Point3 lift_from_plane(const Point2& point, const PlaneFrame& frame) {
  return frame.to_world(Point3(point.x(), point.y(), 0.0));
}

std::vector<Point3> lift_from_plane(std::span<const Point2> points,
                                    const PlaneFrame& frame) {
  std::vector<Point3> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(lift_from_plane(p, frame));
  return out;
}

double distance_to_plane(const Point3& p, const Plane& plane) {
  return std::abs((p - plane.origin).dot(plane.normal));
}

}  // namespace reachfit
