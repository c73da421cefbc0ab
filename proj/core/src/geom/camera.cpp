#include "clf/geom/camera.hpp"

#include <cmath>
#include <utility>

#include "clf/errors.hpp"

namespace clf::geom {

CameraModel::CameraModel(std::string name, double fx, double fy, double cx, double cy,
                         int width, int height, Pose extrinsic)
    : name_(std::move(name)),
      fx_(fx),
      fy_(fy),
      cx_(cx),
      cy_(cy),
      width_(width),
      height_(height),
      extrinsic_(std::move(extrinsic)) {
  if (!(fx_ > 0.0) || !(fy_ > 0.0)) {
    raise(ErrorCode::invalid_argument, "camera '" + name_ + "': focal lengths must be positive");
  }
  if (width_ <= 0 || height_ <= 0) {
    raise(ErrorCode::invalid_argument, "camera '" + name_ + "': image dimensions must be positive");
  }
  if (!(cx_ >= 0.0 && cx_ < width_) || !(cy_ >= 0.0 && cy_ < height_)) {
    raise(ErrorCode::invalid_argument,
          "camera '" + name_ + "': principal point outside the image");
  }
}

std::optional<Projection> CameraModel::project(const Eigen::Vector3d& p_cam) const {
  const double z = p_cam.z();
  if (!(z > kMinProjectionDepth)) return std::nullopt;
  const double u = fx_ * p_cam.x() / z + cx_;
  const double v = fy_ * p_cam.y() / z + cy_;
  if (!pixel_in_image(u, v)) return std::nullopt;
  return Projection{u, v, z};
}

Eigen::Vector3d CameraModel::unproject(double u, double v, double depth) const {
  return {(u - cx_) * depth / fx_, (v - cy_) * depth / fy_, depth};
}

Eigen::Vector3d city_to_camera(const Eigen::Vector3d& p_city, const Pose& ego_pose,
                               const CameraModel& cam) {
  return cam.extrinsic().inverse().apply(ego_pose.inverse().apply(p_city));
}

Eigen::Vector3d camera_to_city(const Eigen::Vector3d& p_cam, const Pose& ego_pose,
                               const CameraModel& cam) {
  return ego_pose.apply(cam.extrinsic().apply(p_cam));
}

Eigen::Vector3d camera_to_ego(const Eigen::Vector3d& p_cam, const CameraModel& cam) {
  return cam.extrinsic().apply(p_cam);
}

}  // namespace clf::geom
