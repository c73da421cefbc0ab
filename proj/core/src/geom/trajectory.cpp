#include "clf/geom/trajectory.hpp"

#include <algorithm>
#include <string>

#include "clf/errors.hpp"

namespace clf::geom {

Trajectory::Trajectory(std::vector<Pose> poses) : poses_(std::move(poses)) {
  for (std::size_t i = 0; i < poses_.size(); ++i) {
    if (!poses_[i].timestamp_ns()) {
      raise(ErrorCode::invalid_argument,
            "trajectory pose " + std::to_string(i) + " has no timestamp");
    }
    if (i > 0 && *poses_[i].timestamp_ns() <= *poses_[i - 1].timestamp_ns()) {
      raise(ErrorCode::invalid_argument,
            "trajectory timestamps not strictly increasing at index " + std::to_string(i));
    }
  }
}

std::int64_t Trajectory::first_ns() const {
  if (poses_.empty()) raise(ErrorCode::empty_trajectory, "trajectory has no poses");
  return *poses_.front().timestamp_ns();
}

std::int64_t Trajectory::last_ns() const {
  if (poses_.empty()) raise(ErrorCode::empty_trajectory, "trajectory has no poses");
  return *poses_.back().timestamp_ns();
}

Pose Trajectory::interpolate_at(std::int64_t t_ns) const {
  if (poses_.empty()) raise(ErrorCode::empty_trajectory, "trajectory has no poses");
  if (t_ns < first_ns() || t_ns > last_ns()) {
    raise(ErrorCode::out_of_range,
          "query t=" + std::to_string(t_ns) + "ns outside trajectory span [" +
              std::to_string(first_ns()) + ", " + std::to_string(last_ns()) + "]");
  }
  const auto it = std::lower_bound(
      poses_.begin(), poses_.end(), t_ns,
      [](const Pose& p, std::int64_t t) { return *p.timestamp_ns() < t; });
  if (*it->timestamp_ns() == t_ns) {
    return *it;
  }
  const Pose& hi = *it;
  const Pose& lo = *std::prev(it);
  const double span = static_cast<double>(*hi.timestamp_ns() - *lo.timestamp_ns());
  const double alpha = static_cast<double>(t_ns - *lo.timestamp_ns()) / span;
  return interpolate(lo, hi, alpha).with_timestamp(t_ns);
}

}  // namespace clf::geom
