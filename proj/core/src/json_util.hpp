#pragma once

// Internal helpers shared by the JSON parsers: every access goes through a
// path-tracking accessor so schema violations report a field locus.

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "clf/errors.hpp"

namespace clf::jsonu {

using nlohmann::json;

inline json parse(std::string_view bytes, const std::string& what) {
  try {
    return json::parse(bytes);
  } catch (const json::exception& e) {
    raise(ErrorCode::schema, what + ": " + e.what());
  }
}

inline const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) raise(ErrorCode::schema, path + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) raise(ErrorCode::schema, path + ": missing field '" + key + "'");
  return *it;
}

inline const json* opt_field(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  const auto it = obj.find(key);
  return (it == obj.end() || it->is_null()) ? nullptr : &*it;
}

inline double num(const json& v, const std::string& path) {
  if (!v.is_number()) raise(ErrorCode::schema, path + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) raise(ErrorCode::schema, path + ": non-finite number");
  return d;
}

inline std::int64_t integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) raise(ErrorCode::schema, path + ": expected an integer");
  return v.get<std::int64_t>();
}

inline bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) raise(ErrorCode::schema, path + ": expected a boolean");
  return v.get<bool>();
}

inline std::string str(const json& v, const std::string& path) {
  if (!v.is_string()) raise(ErrorCode::schema, path + ": expected a string");
  return v.get<std::string>();
}

inline const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) raise(ErrorCode::schema, path + ": expected an array");
  return v;
}

inline Eigen::Vector3d vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) raise(ErrorCode::schema, path + ": expected [x,y,z]");
  return {num(v[0], path), num(v[1], path), num(v[2], path)};
}

inline Eigen::Vector2d vec2(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) raise(ErrorCode::schema, path + ": expected [u,v]");
  return {num(v[0], path), num(v[1], path)};
}

inline std::vector<Eigen::Vector3d> polyline3(const json& v, const std::string& path) {
  const json& arr = array(v, path);
  std::vector<Eigen::Vector3d> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(vec3(arr[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline json from_vec3(const Eigen::Vector3d& p) { return json::array({p.x(), p.y(), p.z()}); }

inline json from_polyline3(const std::vector<Eigen::Vector3d>& poly) {
  json arr = json::array();
  for (const auto& p : poly) arr.push_back(from_vec3(p));
  return arr;
}

}  // namespace clf::jsonu
