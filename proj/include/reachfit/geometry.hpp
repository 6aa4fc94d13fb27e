#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace reachfit {

// Positions are millimetres throughout.
using Point3 = Eigen::Vector3d;
using Point2 = Eigen::Vector2d;

struct Plane {
  Point3 origin = Point3::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
};

// Rigid frame whose rotation maps a plane normal onto +z. Rows of `rotation`
// are the in-plane u axis, the in-plane v axis and the normal.
struct PlaneFrame {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Point3 origin = Point3::Zero();

  Point3 to_local(const Point3& p) const { return rotation * (p - origin); }
  Point3 to_world(const Point3& q) const {
    return origin + rotation.transpose() * q;
  }
};

struct ProjectedPoints {
  std::vector<Point2> points;
  std::vector<double> residuals;  // signed distance along the plane normal
};

// Flips `n` so that z > 0, then x > 0, then y > 0 decides ties.
Eigen::Vector3d canonical_normal(const Eigen::Vector3d& n);

// Total least squares plane through the centroid. Throws DegenerateInput for
// fewer than three points or (near) collinear input.
Plane fit_plane(std::span<const Point3> points);

PlaneFrame plane_frame(const Plane& plane);

ProjectedPoints project_to_plane(std::span<const Point3> points,
                                 const PlaneFrame& frame);

std::vector<Point3> lift_from_plane(std::span<const Point2> points,
                                    const PlaneFrame& frame);

Point3 lift_from_plane(const Point2& point, const PlaneFrame& frame);

double distance_to_plane(const Point3& p, const Plane& plane);

}  // namespace reachfit
