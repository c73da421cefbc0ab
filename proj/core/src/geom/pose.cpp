#include "clf/geom/pose.hpp"

#include <cmath>

#include "clf/errors.hpp"

namespace clf::geom {

Pose::Pose(const Eigen::Quaterniond& rotation, const Eigen::Vector3d& translation,
           std::optional<std::int64_t> timestamp_ns)
    : q_(rotation), t_(translation), stamp_(timestamp_ns) {
  const double n = q_.norm();
  if (!(n > 1e-12) || !std::isfinite(n)) {
    raise(ErrorCode::invalid_argument, "pose quaternion has zero or non-finite norm");
  }
  // Skip the division when already normalized so construction is bitwise idempotent.
  if (std::abs(n - 1.0) > 1e-12) {
    q_.coeffs() /= n;
  }
}

Pose Pose::inverse() const {
  const Eigen::Quaterniond q_inv = q_.conjugate();
  return Pose(q_inv, q_inv * (-t_), stamp_);
}

Pose Pose::compose(const Pose& other) const {
  return Pose(q_ * other.q_, q_ * other.t_ + t_, stamp_);
}

Pose interpolate(const Pose& a, const Pose& b, double alpha) {
  const Eigen::Quaterniond q = a.rotation().slerp(alpha, b.rotation());
  const Eigen::Vector3d t = (1.0 - alpha) * a.translation() + alpha * b.translation();
  return Pose(q, t);
}

}  // namespace clf::geom
