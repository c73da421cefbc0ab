#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace clf::geom {

/// Rigid transform (rotation + translation), optionally timestamped.
/// apply(p) = R * p + t. Immutable after construction; the quaternion is
/// renormalized at construction so its norm stays within 1e-9 of 1.
class Pose {
 public:
  Pose() : q_(1.0, 0.0, 0.0, 0.0), t_(Eigen::Vector3d::Zero()) {}

  Pose(const Eigen::Quaterniond& rotation, const Eigen::Vector3d& translation,
       std::optional<std::int64_t> timestamp_ns = std::nullopt);

  static Pose identity() { return Pose(); }

  const Eigen::Quaterniond& rotation() const { return q_; }
  const Eigen::Vector3d& translation() const { return t_; }
  std::optional<std::int64_t> timestamp_ns() const { return stamp_; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return q_ * p + t_; }

  Pose inverse() const;

  /// compose(other): first apply other, then this. (a.compose(b)).apply(p) == a.apply(b.apply(p)).
  Pose compose(const Pose& other) const;

  Pose with_timestamp(std::int64_t t_ns) const { return Pose(q_, t_, t_ns); }

 private:
  Eigen::Quaterniond q_;
  Eigen::Vector3d t_;
  std::optional<std::int64_t> stamp_;
};

/// Shortest-arc interpolation between two poses: slerp on rotation, lerp on
/// translation. alpha in [0,1]; alpha=0 gives a, alpha=1 gives b.
Pose interpolate(const Pose& a, const Pose& b, double alpha);

}  // namespace clf::geom
