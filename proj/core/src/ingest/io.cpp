#include "clf/ingest/io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "../json_util.hpp"

namespace clf::ingest {

using jsonu::json;

namespace {

geom::Pose parse_pose_qt(const json& j, const std::string& path) {
  const json& q = jsonu::field(j, "q", path);
  if (!q.is_array() || q.size() != 4) raise(ErrorCode::schema, path + ".q: expected [w,x,y,z]");
  const double w = jsonu::num(q[0], path + ".q");
  const double x = jsonu::num(q[1], path + ".q");
  const double y = jsonu::num(q[2], path + ".q");
  const double z = jsonu::num(q[3], path + ".q");
  const Eigen::Vector3d t = jsonu::vec3(jsonu::field(j, "t", path), path + ".t");
  try {
    return geom::Pose(Eigen::Quaterniond(w, x, y, z), t);
  } catch (const Error&) {
    raise(ErrorCode::schema, path + ".q: degenerate quaternion");
  }
}

json pose_qt_to_json(const geom::Pose& pose) {
  const auto& q = pose.rotation();
  json j;
  j["q"] = json::array({q.w(), q.x(), q.y(), q.z()});
  j["t"] = jsonu::from_vec3(pose.translation());
  return j;
}

}  // namespace

VectorMap parse_map(std::string_view bytes) {
  const json root = jsonu::parse(bytes, "map");
  VectorMap map(jsonu::str(jsonu::field(root, "city", "map"), "map.city"));
  const json& lanes = jsonu::array(jsonu::field(root, "lanes", "map"), "map.lanes");
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const std::string path = "map.lanes[" + std::to_string(i) + "]";
    const json& jl = lanes[i];
    LaneSegment lane;
    lane.lane_id = jsonu::integer(jsonu::field(jl, "lane_id", path), path + ".lane_id");
    lane.is_intersection =
        jsonu::boolean(jsonu::field(jl, "is_intersection", path), path + ".is_intersection");
    lane.centerline =
        jsonu::polyline3(jsonu::field(jl, "centerline", path), path + ".centerline");
    if (const json* lb = jsonu::opt_field(jl, "left_boundary")) {
      lane.left_boundary = jsonu::polyline3(*lb, path + ".left_boundary");
    }
    if (const json* rb = jsonu::opt_field(jl, "right_boundary")) {
      lane.right_boundary = jsonu::polyline3(*rb, path + ".right_boundary");
    }
    map.add_lane(std::move(lane));
  }
  return map;
}

std::string serialize_map(const VectorMap& map) {
  json root;
  root["city"] = map.city();
  json lanes = json::array();
  for (const auto& [id, lane] : map.lanes()) {
    json jl;
    jl["lane_id"] = id;
    jl["is_intersection"] = lane.is_intersection;
    jl["centerline"] = jsonu::from_polyline3(lane.centerline);
    if (lane.left_boundary) jl["left_boundary"] = jsonu::from_polyline3(*lane.left_boundary);
    if (lane.right_boundary) jl["right_boundary"] = jsonu::from_polyline3(*lane.right_boundary);
    lanes.push_back(std::move(jl));
  }
  root["lanes"] = std::move(lanes);
  return root.dump() + "\n";
}

geom::Trajectory parse_trajectory(std::string_view bytes) {
  const json root = jsonu::parse(bytes, "trajectory");
  const json& frames = jsonu::array(jsonu::field(root, "frames", "trajectory"), "trajectory.frames");
  if (frames.empty()) raise(ErrorCode::empty_trajectory, "trajectory file has no frames");
  std::vector<geom::Pose> poses;
  poses.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string path = "trajectory.frames[" + std::to_string(i) + "]";
    const std::int64_t t_ns =
        jsonu::integer(jsonu::field(frames[i], "t_ns", path), path + ".t_ns");
    poses.push_back(parse_pose_qt(frames[i], path).with_timestamp(t_ns));
  }
  try {
    return geom::Trajectory(std::move(poses));
  } catch (const Error& e) {
    raise(ErrorCode::schema, std::string("trajectory: ") + e.what());
  }
}

std::string serialize_trajectory(const geom::Trajectory& traj) {
  json frames = json::array();
  for (const auto& pose : traj.poses()) {
    json jf = pose_qt_to_json(pose);
    jf["t_ns"] = *pose.timestamp_ns();
    frames.push_back(std::move(jf));
  }
  json root;
  root["frames"] = std::move(frames);
  return root.dump() + "\n";
}

std::vector<geom::CameraModel> parse_calibration(std::string_view bytes) {
  const json root = jsonu::parse(bytes, "calibration");
  const json& cams =
      jsonu::array(jsonu::field(root, "cameras", "calibration"), "calibration.cameras");
  std::vector<geom::CameraModel> out;
  out.reserve(cams.size());
  for (std::size_t i = 0; i < cams.size(); ++i) {
    const std::string path = "calibration.cameras[" + std::to_string(i) + "]";
    const json& jc = cams[i];
    const std::string name = jsonu::str(jsonu::field(jc, "name", path), path + ".name");
    const double fx = jsonu::num(jsonu::field(jc, "fx", path), path + ".fx");
    const double fy = jsonu::num(jsonu::field(jc, "fy", path), path + ".fy");
    const double cx = jsonu::num(jsonu::field(jc, "cx", path), path + ".cx");
    const double cy = jsonu::num(jsonu::field(jc, "cy", path), path + ".cy");
    const std::int64_t width =
        jsonu::integer(jsonu::field(jc, "width", path), path + ".width");
    const std::int64_t height =
        jsonu::integer(jsonu::field(jc, "height", path), path + ".height");
    const geom::Pose extrinsic =
        parse_pose_qt(jsonu::field(jc, "extrinsic", path), path + ".extrinsic");
    try {
      out.emplace_back(name, fx, fy, cx, cy, static_cast<int>(width), static_cast<int>(height),
                       extrinsic);
    } catch (const Error& e) {
      raise(ErrorCode::schema, path + ": " + e.what());
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.name() < b.name(); });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].name() == out[i - 1].name()) {
      raise(ErrorCode::schema, "calibration: duplicate camera name '" + out[i].name() + "'");
    }
  }
  return out;
}

std::string serialize_calibration(const std::vector<geom::CameraModel>& cameras) {
  std::vector<const geom::CameraModel*> sorted;
  sorted.reserve(cameras.size());
  for (const auto& c : cameras) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->name() < b->name(); });
  json arr = json::array();
  for (const auto* cam : sorted) {
    json jc;
    jc["name"] = cam->name();
    jc["fx"] = cam->fx();
    jc["fy"] = cam->fy();
    jc["cx"] = cam->cx();
    jc["cy"] = cam->cy();
    jc["width"] = cam->width();
    jc["height"] = cam->height();
    jc["extrinsic"] = pose_qt_to_json(cam->extrinsic());
    arr.push_back(std::move(jc));
  }
  json root;
  root["cameras"] = std::move(arr);
  return root.dump() + "\n";
}

namespace {
constexpr char kMaskMagic[4] = {'S', 'M', 'K', '1'};
constexpr std::size_t kMaskHeaderSize = 16;

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}
}  // namespace

SemanticMask parse_mask(std::string_view bytes) {
  if (bytes.size() < kMaskHeaderSize) raise(ErrorCode::schema, "mask: truncated header");
  if (std::memcmp(bytes.data(), kMaskMagic, 4) != 0) {
    raise(ErrorCode::schema, "mask: bad magic, expected 'SMK1'");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t width = read_u32le(p + 4);
  const std::uint32_t height = read_u32le(p + 8);
  if (read_u32le(p + 12) != 0) raise(ErrorCode::schema, "mask: reserved bytes must be zero");
  if (width == 0 || height == 0) raise(ErrorCode::schema, "mask: zero dimension");
  const std::uint64_t expected =
      kMaskHeaderSize + static_cast<std::uint64_t>(width) * height;
  if (bytes.size() != expected) {
    raise(ErrorCode::schema, "mask: payload is " + std::to_string(bytes.size() - kMaskHeaderSize) +
                                 " bytes, header declares " +
                                 std::to_string(static_cast<std::uint64_t>(width) * height));
  }
  std::vector<std::uint8_t> labels(bytes.begin() + kMaskHeaderSize, bytes.end());
  return SemanticMask(width, height, std::move(labels));
}

std::string serialize_mask(const SemanticMask& mask) {
  std::string out;
  out.reserve(kMaskHeaderSize + mask.data().size());
  out.append(kMaskMagic, 4);
  write_u32le(out, mask.width());
  write_u32le(out, mask.height());
  write_u32le(out, 0);
  out.append(reinterpret_cast<const char*>(mask.data().data()), mask.data().size());
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::io_error, "cannot open " + path.string());
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) raise(ErrorCode::io_error, "read failed for " + path.string());
  return contents;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) raise(ErrorCode::io_error, "write failed for " + path.string());
}

}  // namespace clf::ingest
