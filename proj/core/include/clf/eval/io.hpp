#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "clf/eval/metrics.hpp"

namespace clf::eval {

/// Per-frame entry of a report file.
struct FrameMetrics {
  std::string frame_id;
  MetricsReport metrics;
};

// Report file (.report.json): {"match_spec", "error_averaging", "frames", "corpus"}.
std::string serialize_report(const MatchSpec& spec, const std::vector<FrameMetrics>& frames,
                             const MetricsReport& corpus);

// Decoded-centerline file (.lanes.json): {"frame_id", "lanes": [[[x,y,z],...],...]},
// polylines in the ego/BEV frame.
struct FrameLanes {
  std::string frame_id;
  std::vector<Polyline3> lanes;
};
std::string serialize_lanes(const FrameLanes& lanes);
FrameLanes parse_lanes(std::string_view bytes);

}  // namespace clf::eval
