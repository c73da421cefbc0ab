#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace clf::ingest {

/// One mapped lane: 3D centerline polyline in the city frame plus optional
/// boundary polylines. Boundaries are carried through but receive no further
/// processing.
struct LaneSegment {
  std::int64_t lane_id = 0;
  bool is_intersection = false;
  std::vector<Eigen::Vector3d> centerline;
  std::optional<std::vector<Eigen::Vector3d>> left_boundary;
  std::optional<std::vector<Eigen::Vector3d>> right_boundary;
};

/// Throws unless the lane has >= 2 centerline vertices with no identical
/// consecutive pair.
void validate_lane(const LaneSegment& lane);

class VectorMap {
 public:
  VectorMap() = default;
  explicit VectorMap(std::string city_name) : city_(std::move(city_name)) {}

  const std::string& city() const { return city_; }

  /// Validates the lane and rejects duplicate lane ids.
  void add_lane(LaneSegment lane);

  const LaneSegment* find(std::int64_t lane_id) const;
  const std::map<std::int64_t, LaneSegment>& lanes() const { return lanes_; }
  std::size_t size() const { return lanes_.size(); }

 private:
  std::string city_;
  std::map<std::int64_t, LaneSegment> lanes_;
};

}  // namespace clf::ingest
