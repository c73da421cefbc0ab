#include "clf/heads/decode.hpp"

#include <algorithm>
#include <map>

#include "clf/errors.hpp"
#include "clf/heads/losses.hpp"

namespace clf::heads {

std::vector<std::vector<Eigen::Vector3d>> decode_bev(const HeadOutput& out,
                                                     const labelgen::BevGridSpec& grid,
                                                     const DecodeParams& params) {
  out.validate();
  grid.validate();
  if (static_cast<int>(out.s1) != grid.cols() || static_cast<int>(out.s2) != grid.rows()) {
    raise(ErrorCode::shape_mismatch, "head output grid does not match the BEV spec");
  }

  const std::size_t n = out.plane_size();
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (out.conf[i] >= params.conf_threshold) active.push_back(i);
  }

  auto embedding = [&](std::size_t cell) {
    Eigen::VectorXd e(out.embed_dim);
    for (std::uint32_t d = 0; d < out.embed_dim; ++d) {
      e[d] = out.embed[static_cast<std::size_t>(d) * n + cell];
    }
    return e;
  };

  std::vector<bool> assigned(n, false);
  std::vector<std::vector<std::size_t>> clusters;
  std::size_t remaining = active.size();
  while (remaining > 0) {
    // Seed: highest confidence among unassigned, row-major order breaking ties.
    std::size_t seed = n;
    float best_conf = -1.0f;
    for (const std::size_t i : active) {
      if (!assigned[i] && out.conf[i] > best_conf) {
        best_conf = out.conf[i];
        seed = i;
      }
    }
    std::vector<std::size_t> cluster{seed};
    assigned[seed] = true;
    --remaining;
    Eigen::VectorXd mean = embedding(seed);

    bool grew = true;
    while (grew && remaining > 0) {
      grew = false;
      for (const std::size_t i : active) {
        if (assigned[i]) continue;
        const Eigen::VectorXd e = embedding(i);
        if ((e - mean).norm() < params.embed_radius) {
          assigned[i] = true;
          --remaining;
          cluster.push_back(i);
          mean += (e - mean) / static_cast<double>(cluster.size());
          grew = true;
        }
      }
    }
    clusters.push_back(std::move(cluster));
  }

  std::vector<std::vector<Eigen::Vector3d>> polylines;
  for (const auto& cluster : clusters) {
    if (cluster.size() < params.min_cells) continue;
    // One point per row: highest-confidence cell wins.
    std::map<int, std::size_t> row_cell;
    for (const std::size_t i : cluster) {
      const int row = static_cast<int>(i / out.s1);
      const auto it = row_cell.find(row);
      if (it == row_cell.end() || out.conf[i] > out.conf[it->second]) row_cell[row] = i;
    }
    std::vector<Eigen::Vector3d> line;
    line.reserve(row_cell.size());
    for (const auto& [row, i] : row_cell) {
      const int col = static_cast<int>(i % out.s1);
      const double x = grid.col_left_x(col) + sigmoid(out.x_offset_logits[i]) * grid.cell;
      line.emplace_back(x, grid.row_center_y(row), out.height[i]);
    }
    polylines.push_back(std::move(line));
  }
  return polylines;
}

}  // namespace clf::heads
