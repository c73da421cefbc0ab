#include "clf/labelgen/bev.hpp"

#include <cmath>
#include <map>

namespace clf::labelgen {

void BevGridSpec::validate() const {
  if (!(cell > 0.0)) raise(ErrorCode::invalid_argument, "BEV cell size must be positive");
  if (!(x_max > x_min) || !(y_max > y_min)) {
    raise(ErrorCode::invalid_argument, "BEV extents must be non-empty");
  }
  const double sx = (x_max - x_min) / cell;
  const double sy = (y_max - y_min) / cell;
  if (std::abs(sx - std::round(sx)) > 1e-9 || std::abs(sy - std::round(sy)) > 1e-9) {
    raise(ErrorCode::invalid_argument, "BEV extents must be integer multiples of the cell size");
  }
}

BevTargets encode_bev(const std::vector<std::vector<Eigen::Vector3d>>& centerlines_ego,
                      const BevGridSpec& spec) {
  spec.validate();
  const int rows = spec.rows();
  const int cols = spec.cols();

  BevTargets t;
  t.spec = spec;
  t.seg = Grid<std::uint8_t>(rows, cols, 0);
  t.x_offset = Grid<double>(rows, cols, BevTargets::kUndefined);
  t.height = Grid<double>(rows, cols, BevTargets::kUndefined);
  t.instance = Grid<std::uint32_t>(rows, cols, 0);

  for (std::size_t lane = 0; lane < centerlines_ego.size(); ++lane) {
    const auto& poly = centerlines_ego[lane];
    // Best crossing per row: nearest to the ego laterally.
    std::map<int, Eigen::Vector3d> best;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
      const Eigen::Vector3d& p = poly[i];
      const Eigen::Vector3d& q = poly[i + 1];
      const double y_lo = std::min(p.y(), q.y());
      const double y_hi = std::max(p.y(), q.y());
      if (y_hi == y_lo) continue;  // segment parallel to the row lines
      int r = static_cast<int>(std::ceil((y_lo - spec.y_min) / spec.cell - 0.5));
      if (r < 0) r = 0;
      for (; r < rows; ++r) {
        const double yc = spec.row_center_y(r);
        if (yc < y_lo) continue;
        if (yc >= y_hi) break;
        const double alpha = (yc - p.y()) / (q.y() - p.y());
        const double x = p.x() + alpha * (q.x() - p.x());
        const double z = p.z() + alpha * (q.z() - p.z());
        if (x < spec.x_min || x >= spec.x_max) continue;
        const auto it = best.find(r);
        if (it == best.end() || std::abs(x) < std::abs(it->second.x())) {
          best[r] = Eigen::Vector3d(x, yc, z);
        }
      }
    }
    for (const auto& [r, hit] : best) {
      const int col = static_cast<int>(std::floor((hit.x() - spec.x_min) / spec.cell));
      t.seg.at(r, col) = 1;
      t.x_offset.at(r, col) = (hit.x() - spec.col_left_x(col)) / spec.cell;
      t.height.at(r, col) = hit.z();
      t.instance.at(r, col) = static_cast<std::uint32_t>(lane + 1);
    }
  }
  return t;
}

std::vector<std::vector<Eigen::Vector3d>> bev_to_polylines(const BevTargets& targets) {
  std::map<std::uint32_t, std::vector<Eigen::Vector3d>> lanes;
  for (int r = 0; r < targets.seg.rows(); ++r) {
    for (int c = 0; c < targets.seg.cols(); ++c) {
      if (targets.seg.at(r, c) == 0 || targets.instance.at(r, c) == 0) continue;
      lanes[targets.instance.at(r, c)].emplace_back(
          targets.spec.col_left_x(c) + targets.x_offset.at(r, c) * targets.spec.cell,
          targets.spec.row_center_y(r), targets.height.at(r, c));
    }
  }
  std::vector<std::vector<Eigen::Vector3d>> out;
  out.reserve(lanes.size());
  for (auto& [id, pts] : lanes) out.push_back(std::move(pts));
  return out;
}

}  // namespace clf::labelgen
