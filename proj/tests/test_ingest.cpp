#include <doctest.h>

#include <random>

#include "clf/errors.hpp"
#include "clf/ingest/io.hpp"
#include "test_support.hpp"

using namespace clf;
using namespace clf::ingest;

namespace {

VectorMap random_map(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_lanes(1, 5);
  std::uniform_int_distribution<int> n_verts(2, 8);
  std::normal_distribution<double> coord(0.0, 50.0);
  std::bernoulli_distribution flag(0.3);
  VectorMap map("pittsburgh");
  const int lanes = n_lanes(rng);
  for (int i = 0; i < lanes; ++i) {
    LaneSegment lane;
    lane.lane_id = 10 * i + static_cast<int>(rng() % 7);
    lane.is_intersection = flag(rng);
    const int verts = n_verts(rng);
    for (int v = 0; v < verts; ++v) {
      lane.centerline.emplace_back(coord(rng), coord(rng), coord(rng));
    }
    if (flag(rng)) {
      lane.left_boundary = lane.centerline;
      (*lane.left_boundary)[0].x() += 1.5;
    }
    map.add_lane(std::move(lane));
  }
  return map;
}

geom::Trajectory random_trajectory(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  std::uniform_int_distribution<int> count(1, 12);
  std::vector<geom::Pose> poses;
  const int frames = count(rng);
  for (int i = 0; i < frames; ++i) {
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    q.normalize();
    poses.emplace_back(q, Eigen::Vector3d(n(rng), n(rng), n(rng)),
                       static_cast<std::int64_t>(i) * 50'000'000 + static_cast<std::int64_t>(rng() % 1000));
  }
  return geom::Trajectory(std::move(poses));
}

SemanticMask random_mask(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> dim(1, 64);
  const std::uint32_t w = dim(rng), h = dim(rng);
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(w) * h);
  for (auto& v : labels) v = static_cast<std::uint8_t>(rng() % 256);
  return {w, h, std::move(labels)};
}

}  // namespace

TEST_CASE("parse_map loads a minimal one-lane file") {
  const std::string text = R"({"city":"miami","lanes":[
    {"lane_id": 7, "is_intersection": false,
     "centerline": [[0,0,0],[10,0,0]]}]})";
  const VectorMap map = parse_map(text);
  CHECK(map.city() == "miami");
  REQUIRE(map.size() == 1);
  REQUIRE(map.find(7) != nullptr);
  CHECK(map.find(7)->centerline.size() == 2);
  CHECK_FALSE(map.find(7)->left_boundary.has_value());
}

TEST_CASE("parse_map rejects duplicate lane ids") {
  const std::string text = R"({"city":"miami","lanes":[
    {"lane_id": 7, "is_intersection": false, "centerline": [[0,0,0],[10,0,0]]},
    {"lane_id": 7, "is_intersection": true,  "centerline": [[0,1,0],[10,1,0]]}]})";
  try {
    parse_map(text);
    FAIL("expected DuplicateLaneId");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::duplicate_lane_id);
  }
}

TEST_CASE("parse_map reports a field locus on schema violations") {
  const std::string text = R"({"city":"miami","lanes":[
    {"lane_id": 7, "is_intersection": false, "centerline": [[0,0,0],[10,"x",0]]}]})";
  CHECK_THROWS_WITH_AS(parse_map(text), doctest::Contains("lanes[0].centerline"), Error);
}

TEST_CASE("parse_map rejects single-vertex and stuttering centerlines") {
  CHECK_THROWS_AS(
      parse_map(R"({"city":"c","lanes":[{"lane_id":1,"is_intersection":false,"centerline":[[0,0,0]]}]})"),
      Error);
  CHECK_THROWS_AS(
      parse_map(
          R"({"city":"c","lanes":[{"lane_id":1,"is_intersection":false,"centerline":[[0,0,0],[0,0,0]]}]})"),
      Error);
}

TEST_CASE("empty trajectory file is an EmptyTrajectory error") {
  try {
    parse_trajectory(R"({"frames":[]})");
    FAIL("expected EmptyTrajectory");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_trajectory);
  }
}

TEST_CASE("calibration with nonpositive focal length is a SchemaError") {
  const std::string text = R"({"cameras":[{"name":"front","fx":-100,"fy":100,"cx":10,"cy":10,
    "width":100,"height":100,"extrinsic":{"q":[1,0,0,0],"t":[0,0,0]}}]})";
  try {
    parse_calibration(text);
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::schema);
  }
}

TEST_CASE("mask payload length must match the header") {
  std::string bytes = "SMK1";
  auto push_u32 = [&bytes](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  push_u32(4);
  push_u32(2);
  push_u32(0);
  bytes.append(7, '\x01');  // header says 8
  try {
    parse_mask(bytes);
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::schema);
  }
}

TEST_CASE("mask format is bit-exact") {
  auto rng = test::seeded_rng(21);
  const SemanticMask mask = random_mask(rng);
  const std::string bytes = serialize_mask(mask);
  CHECK(bytes.substr(0, 4) == "SMK1");
  CHECK(bytes.size() == 16 + static_cast<std::size_t>(mask.width()) * mask.height());
  const SemanticMask back = parse_mask(bytes);
  CHECK(back.width() == mask.width());
  CHECK(back.height() == mask.height());
  CHECK(back.data() == mask.data());
  CHECK(serialize_mask(back) == bytes);
}

TEST_CASE("serialize/parse round-trips of generated corpora") {
  auto rng = test::seeded_rng(22);
  for (int iter = 0; iter < 25; ++iter) {
    {  // map
      const VectorMap map = random_map(rng);
      const std::string bytes = serialize_map(map);
      const VectorMap back = parse_map(bytes);
      CHECK(back.city() == map.city());
      REQUIRE(back.size() == map.size());
      for (const auto& [id, lane] : map.lanes()) {
        const LaneSegment* other = back.find(id);
        REQUIRE(other != nullptr);
        CHECK(other->is_intersection == lane.is_intersection);
        REQUIRE(other->centerline.size() == lane.centerline.size());
        for (std::size_t i = 0; i < lane.centerline.size(); ++i) {
          CHECK(other->centerline[i] == lane.centerline[i]);  // bit-equal doubles
        }
        CHECK(other->left_boundary.has_value() == lane.left_boundary.has_value());
      }
      CHECK(serialize_map(back) == bytes);  // serialize . parse fixpoint
    }
    {  // trajectory
      const geom::Trajectory traj = random_trajectory(rng);
      const std::string bytes = serialize_trajectory(traj);
      const geom::Trajectory back = parse_trajectory(bytes);
      REQUIRE(back.size() == traj.size());
      for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(back.at(i).timestamp_ns() == traj.at(i).timestamp_ns());
        CHECK(back.at(i).translation() == traj.at(i).translation());
        CHECK(back.at(i).rotation().coeffs() == traj.at(i).rotation().coeffs());
      }
      CHECK(serialize_trajectory(back) == bytes);
    }
    {  // calibration
      std::normal_distribution<double> n;
      Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
      q.normalize();
      const std::vector<geom::CameraModel> cams = {
          {"front_left", 700.5, 701.25, 300.0, 200.0, 640, 480,
           geom::Pose(q, {0.1, -0.2, 1.4})},
          {"front_right", 702.0, 700.0, 321.5, 201.5, 640, 480, geom::Pose::identity()},
      };
      const std::string bytes = serialize_calibration(cams);
      const auto back = parse_calibration(bytes);
      REQUIRE(back.size() == 2);
      CHECK(back[0].name() == "front_left");
      CHECK(back[0].fx() == 700.5);
      CHECK(back[0].extrinsic().rotation().coeffs() == cams[0].extrinsic().rotation().coeffs());
      CHECK(serialize_calibration(back) == bytes);
    }
    {  // mask
      const SemanticMask mask = random_mask(rng);
      const std::string bytes = serialize_mask(mask);
      CHECK(serialize_mask(parse_mask(bytes)) == bytes);
    }
  }
}

TEST_CASE("parsers return structured errors on arbitrary bytes") {
  auto rng = test::seeded_rng(23);
  std::uniform_int_distribution<int> len(0, 300);
  for (int iter = 0; iter < 500; ++iter) {
    std::string junk(static_cast<std::size_t>(len(rng)), '\0');
    for (auto& c : junk) c = static_cast<char>(rng() % 256);
    for (int which = 0; which < 4; ++which) {
      try {
        switch (which) {
          case 0: (void)parse_map(junk); break;
          case 1: (void)parse_trajectory(junk); break;
          case 2: (void)parse_calibration(junk); break;
          case 3: (void)parse_mask(junk); break;
        }
      } catch (const Error&) {
        // structured failure is the contract
      }
    }
  }
  CHECK(true);  // reaching here means no crash and no foreign exception
}
