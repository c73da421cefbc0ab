#pragma once

#include <cstdint>
#include <vector>

#include "clf/geom/pose.hpp"

namespace clf::geom {

/// Timestamped ego pose sequence with strictly increasing timestamps.
/// Queries outside [first, last] are rejected.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<Pose> poses);

  bool empty() const { return poses_.empty(); }
  std::size_t size() const { return poses_.size(); }
  const std::vector<Pose>& poses() const { return poses_; }
  const Pose& at(std::size_t i) const { return poses_.at(i); }

  std::int64_t first_ns() const;
  std::int64_t last_ns() const;

  /// Pose at time t: exact sample when t matches a timestamp, otherwise
  /// translation lerp + rotation slerp between the bracketing samples.
  Pose interpolate_at(std::int64_t t_ns) const;

 private:
  std::vector<Pose> poses_;
};

}  // namespace clf::geom
