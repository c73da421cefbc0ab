#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace clf::eval {

using Polyline3 = std::vector<Eigen::Vector3d>;

/// Matching configuration. Lateral X errors and height Z errors are reported
/// separately for the near and far longitudinal bands.
struct MatchSpec {
  double match_threshold = 1.5;  // mean |dx| gate, meters
  double near_lo = 0.0, near_hi = 40.0;
  double far_lo = 40.0, far_hi = 100.0;
  double row_step = 0.5;  // resampling step along y, grid-aligned

  void validate() const;
};

/// One resampled row shared by a matched pair.
struct RowSample {
  double y = 0.0;
  double x_pred = 0.0, x_gt = 0.0;
  double z_pred = 0.0, z_gt = 0.0;
};

struct MatchedPair {
  std::size_t pred_index = 0;
  std::size_t gt_index = 0;
  double mean_abs_dx = 0.0;
  std::vector<RowSample> rows;
};

struct Assignment {
  std::vector<MatchedPair> matches;
  std::vector<std::size_t> unmatched_pred;
  std::vector<std::size_t> unmatched_gt;
};

/// Cost-minimal one-to-one matching between prediction and ground-truth
/// polylines (BEV frame). Both sets are resampled at row centers
/// (row_step-aligned); a pair is compatible when the mean |dx| over shared
/// rows is <= match_threshold. Among assignments with the maximum number of
/// compatible pairs, the one minimizing total mean |dx| wins.
Assignment match(const std::vector<Polyline3>& pred, const std::vector<Polyline3>& gt,
                 const MatchSpec& spec);

struct MetricsReport {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  // Mean |x_pred - x_gt| / |z_pred - z_gt| over matched points per band;
  // absent when no matched points fall in the band.
  std::optional<double> x_err_near, x_err_far, z_err_near, z_err_far;
  bool degenerate = false;  // a precision/recall denominator was zero
};

MetricsReport score(const Assignment& assignment, const MatchSpec& spec);

/// Order-independent reduction of per-frame assignments into a corpus report.
class MetricsAccumulator {
 public:
  void add(const Assignment& assignment, const MatchSpec& spec);
  void merge(const MetricsAccumulator& other);
  MetricsReport report() const;

 private:
  std::size_t tp_ = 0, fp_ = 0, fn_ = 0;
  double sum_dx_[2] = {0.0, 0.0};  // [near, far]
  double sum_dz_[2] = {0.0, 0.0};
  std::size_t n_rows_[2] = {0, 0};
};

}  // namespace clf::eval
