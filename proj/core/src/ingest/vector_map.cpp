#include "clf/ingest/vector_map.hpp"

#include "clf/errors.hpp"

namespace clf::ingest {

void validate_lane(const LaneSegment& lane) {
  const std::string where = "lane " + std::to_string(lane.lane_id);
  if (lane.centerline.size() < 2) {
    raise(ErrorCode::schema, where + ": centerline needs >= 2 vertices");
  }
  for (std::size_t i = 1; i < lane.centerline.size(); ++i) {
    if (lane.centerline[i] == lane.centerline[i - 1]) {
      raise(ErrorCode::schema,
            where + ": identical consecutive centerline vertices at " + std::to_string(i));
    }
  }
}

void VectorMap::add_lane(LaneSegment lane) {
  validate_lane(lane);
  const auto id = lane.lane_id;
  if (!lanes_.emplace(id, std::move(lane)).second) {
    raise(ErrorCode::duplicate_lane_id, "lane_id " + std::to_string(id) + " already present");
  }
}

const LaneSegment* VectorMap::find(std::int64_t lane_id) const {
  const auto it = lanes_.find(lane_id);
  return it == lanes_.end() ? nullptr : &it->second;
}

}  // namespace clf::ingest
