#pragma once

#include <string>
#include <string_view>

#include "clf/labelgen/pipeline.hpp"

namespace clf::labelgen {

/// FrameLabels plus the identifiers a label file carries.
struct LabeledFrame {
  std::string frame_id;
  std::string camera;
  FrameLabels labels;
};

// Label file (.clabel.json): {"frame_id", "camera", "t_occ_used",
//   "centerlines": [{"lane_id", "r_occ", "n_total", "n_occluded",
//                    "keypoints": [{"u","v","x","y","z","depth","class_id","category"}],
//                    "spline_2d": [[u,v],...]}],
//   "bev": {"spec", "seg", "x_offset", "height", "instance"}}
// with grids row-major and undefined offset/height cells serialized as null.
// A t_occ_used of null means no removal threshold was applied (+inf).
std::string serialize_labels(const LabeledFrame& frame);
LabeledFrame parse_labels(std::string_view bytes);

}  // namespace clf::labelgen
