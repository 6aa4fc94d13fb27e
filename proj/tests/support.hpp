#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "reachfit/geometry.hpp"
#include "reachfit/signal.hpp"

namespace test {

using reachfit::Point2;
using reachfit::Point3;

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  return q.normalized().toRotationMatrix();
}

inline Eigen::Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Vector3d v(g(rng), g(rng), g(rng));
  return v.normalized();
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Uniformly sampled trajectory of `f` over [0, duration].
inline reachfit::Trajectory sample(const std::function<Point3(double)>& f, double duration,
                                   double rate_hz, double t0 = 0.0) {
  reachfit::Trajectory t;
  const auto n = static_cast<std::size_t>(std::llround(duration * rate_hz)) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = static_cast<double>(i) / rate_hz;
    t.timestamps.push_back(t0 + ti);
    t.positions.push_back(f(ti));
  }
  return t;
}

inline double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

// Sign- and scale-free distance between two coefficient vectors.
template <typename V>
double projective_distance(const V& a, const V& b) {
  const V an = a.normalized();
  const V bn = b.normalized();
  return std::min((an - bn).norm(), (an + bn).norm());
}

}  // namespace test
