#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "clf/geom/camera.hpp"
#include "clf/geom/trajectory.hpp"
#include "clf/ingest/semantic_mask.hpp"
#include "clf/ingest/vector_map.hpp"

namespace clf::ingest {

// Interchange formats. The JSON serializers are deterministic (sorted keys,
// shortest round-trip number formatting), so serialize(parse(serialize(x)))
// is byte-identical to serialize(x). Parsers throw clf::Error on any
// malformed input, never crash.

// Map file (.cmap.json):
//   {"city": ..., "lanes": [{"lane_id", "is_intersection", "centerline",
//    "left_boundary"?, "right_boundary"?}, ...]}
VectorMap parse_map(std::string_view bytes);
std::string serialize_map(const VectorMap& map);

// Trajectory file (.traj.json): {"frames": [{"t_ns", "q": [w,x,y,z], "t": [x,y,z]}]}
geom::Trajectory parse_trajectory(std::string_view bytes);
std::string serialize_trajectory(const geom::Trajectory& traj);

// Calibration file (.calib.json): {"cameras": [{"name", "fx", "fy", "cx", "cy",
//   "width", "height", "extrinsic": {"q", "t"}}]}. Cameras come back sorted by name.
std::vector<geom::CameraModel> parse_calibration(std::string_view bytes);
std::string serialize_calibration(const std::vector<geom::CameraModel>& cameras);

// Mask file (.smask), bit-exact: "SMK1", u32le width, u32le height, 4 reserved
// zero bytes, then width*height class IDs row-major.
SemanticMask parse_mask(std::string_view bytes);
std::string serialize_mask(const SemanticMask& mask);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace clf::ingest
