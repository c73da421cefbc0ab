#pragma once

#include <string>

#include "clf/labelgen/label_io.hpp"

namespace clf::cli {

/// Static SVG overlay for one label file: image-plane panel (keypoints by
/// category + 2D splines) next to a BEV panel (grid extent + encoded cells).
std::string render_label_svg(const labelgen::LabeledFrame& frame, int width, int height);

}  // namespace clf::cli
