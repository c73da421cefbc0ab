#include "svg.hpp"

#include <cstdio>

namespace clf::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* category_color(occlusion::Category c) {
  switch (c) {
    case occlusion::Category::valid: return "#2ca02c";
    case occlusion::Category::occlusion_valid: return "#ff7f0e";
    case occlusion::Category::invalid: return "#d62728";
  }
  return "#d62728";
}

const char* instance_color(std::uint32_t id) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return palette[id % 8];
}

}  // namespace

std::string render_label_svg(const labelgen::LabeledFrame& frame, int width, int height) {
  const auto& bev = frame.labels.bev;
  const double bev_scale = 2.0;  // svg px per BEV cell
  const double bev_w = bev.seg.cols() * bev_scale;
  const double bev_h = bev.seg.rows() * bev_scale;
  const double margin = 20.0;
  const double total_w = width + margin + bev_w + margin;
  const double total_h = std::max<double>(height, bev_h) + margin;

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(total_w) + "\" height=\"" +
         num(total_h) + "\" viewBox=\"0 0 " + num(total_w) + " " + num(total_h) + "\">\n";

  // image panel
  svg += "<g id=\"image\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" fill=\"#101018\" stroke=\"#444444\"/>\n";
  for (const auto& line : frame.labels.centerlines) {
    if (line.spline_2d.size() >= 2) {
      std::string points;
      for (const auto& p : line.spline_2d) {
        points += num(p.x()) + "," + num(p.y()) + " ";
      }
      svg += "<polyline fill=\"none\" stroke=\"#00bcd4\" stroke-width=\"1.5\" points=\"" +
             points + "\"/>\n";
    }
    for (const auto& kp : line.keypoints) {
      svg += "<circle cx=\"" + num(kp.pixel.x()) + "\" cy=\"" + num(kp.pixel.y()) +
             "\" r=\"2.5\" fill=\"" + category_color(kp.category) + "\"/>\n";
    }
  }
  svg += "</g>\n";

  // BEV panel: rows grow away from the ego, draw them bottom-up
  const double bx = width + margin;
  svg += "<g id=\"bev\">\n";
  svg += "<rect x=\"" + num(bx) + "\" y=\"0\" width=\"" + num(bev_w) + "\" height=\"" +
         num(bev_h) + "\" fill=\"#0a0a10\" stroke=\"#444444\"/>\n";
  for (int r = 0; r < bev.seg.rows(); ++r) {
    for (int c = 0; c < bev.seg.cols(); ++c) {
      if (bev.seg.at(r, c) == 0) continue;
      const double x = bx + c * bev_scale;
      const double y = bev_h - (r + 1) * bev_scale;
      svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(bev_scale) +
             "\" height=\"" + num(bev_scale) + "\" fill=\"" +
             instance_color(bev.instance.at(r, c)) + "\"/>\n";
    }
  }
  svg += "</g>\n";

  // caption
  svg += "<text x=\"4\" y=\"" + num(total_h - 6.0) +
         "\" fill=\"#cccccc\" font-size=\"10\" font-family=\"monospace\">frame " +
         frame.frame_id + " camera " + frame.camera + " lines " +
         std::to_string(frame.labels.centerlines.size()) + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace clf::cli
