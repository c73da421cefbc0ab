#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "clf/geom/pose.hpp"

namespace clf::geom {

/// Pixel hit of a 3D point: u right, v down, depth along the optical axis.
struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

/// Points closer than this to the image plane do not project.
inline constexpr double kMinProjectionDepth = 0.1;

/// Rectified pinhole camera. Camera frame: x right, y down, z forward
/// (optical axis). extrinsic is the camera pose in the ego frame, so
/// extrinsic.apply maps camera coordinates to ego coordinates.
class CameraModel {
 public:
  CameraModel(std::string name, double fx, double fy, double cx, double cy,
              int width, int height, Pose extrinsic);

  const std::string& name() const { return name_; }
  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  int width() const { return width_; }
  int height() const { return height_; }
  const Pose& extrinsic() const { return extrinsic_; }

  /// nullopt when the point is behind the near cutoff or lands outside
  /// [0,width) x [0,height).
  std::optional<Projection> project(const Eigen::Vector3d& p_cam) const;

  /// Inverse of project for visible points: pixel + depth back to camera frame.
  Eigen::Vector3d unproject(double u, double v, double depth) const;

  bool pixel_in_image(double u, double v) const {
    return u >= 0.0 && u < width_ && v >= 0.0 && v < height_;
  }

 private:
  std::string name_;
  double fx_, fy_, cx_, cy_;
  int width_, height_;
  Pose extrinsic_;
};

/// City frame -> camera frame via the city->ego->camera chain:
/// inverse(extrinsic) ∘ inverse(ego_pose).
Eigen::Vector3d city_to_camera(const Eigen::Vector3d& p_city, const Pose& ego_pose,
                               const CameraModel& cam);

/// Exact inverse of city_to_camera.
Eigen::Vector3d camera_to_city(const Eigen::Vector3d& p_cam, const Pose& ego_pose,
                               const CameraModel& cam);

/// Camera frame -> ego frame (applies the extrinsic).
Eigen::Vector3d camera_to_ego(const Eigen::Vector3d& p_cam, const CameraModel& cam);

}  // namespace clf::geom
