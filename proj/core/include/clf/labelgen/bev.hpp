#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "clf/errors.hpp"

namespace clf::labelgen {

/// BEV grid over the ego frame: x lateral (columns, s1), y longitudinal
/// (rows, s2), z up. Extents must be integer multiples of the cell size.
struct BevGridSpec {
  double x_min = -16.0;
  double x_max = 16.0;
  double y_min = 0.0;
  double y_max = 100.0;
  double cell = 0.5;

  void validate() const;

  int cols() const { return static_cast<int>(std::llround((x_max - x_min) / cell)); }  // s1
  int rows() const { return static_cast<int>(std::llround((y_max - y_min) / cell)); }  // s2

  double row_center_y(int row) const { return y_min + (row + 0.5) * cell; }
  double col_left_x(int col) const { return x_min + col * cell; }

  bool operator==(const BevGridSpec&) const = default;
};

template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  T& at(int row, int col) { return data_[static_cast<std::size_t>(row) * cols_ + col]; }
  const T& at(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * cols_ + col];
  }
  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

/// Grid-quantized supervision. x_offset is the sub-cell lateral position as a
/// fraction of the cell in [0,1); x_offset and height are NaN exactly where
/// seg == 0. instance 0 is background.
struct BevTargets {
  BevGridSpec spec;
  Grid<std::uint8_t> seg;
  Grid<double> x_offset;
  Grid<double> height;
  Grid<std::uint32_t> instance;

  static constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();
};

/// Rasterizes ego-frame centerline polylines onto the grid: for every row a
/// lane crosses, the crossed cell gets seg=1, the sub-cell offset, the
/// interpolated height, and the lane's 1-based instance id. A lane crossing
/// the same row more than once keeps only the crossing nearest the ego
/// (smallest |x|); one cell per (lane, row).
BevTargets encode_bev(const std::vector<std::vector<Eigen::Vector3d>>& centerlines_ego,
                      const BevGridSpec& spec);

/// Exact readback of the encoded crossings: per instance id (ascending), one
/// point per marked row at x = cell left edge + offset * cell, y = row
/// center, z = height, rows ascending.
std::vector<std::vector<Eigen::Vector3d>> bev_to_polylines(const BevTargets& targets);

}  // namespace clf::labelgen
