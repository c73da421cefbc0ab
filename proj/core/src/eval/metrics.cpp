#include "clf/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "clf/errors.hpp"

namespace clf::eval {

namespace {

constexpr double kIncompatible = 1e9;

void harmonic_f1(MetricsReport& r) {
  if (r.tp + r.fp == 0 || r.tp + r.fn == 0) r.degenerate = true;
  r.precision = (r.tp + r.fp) ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
  r.recall = (r.tp + r.fn) ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
  r.f1 = (r.precision + r.recall) > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
}

/// x/z per row center crossed by the polyline; first crossing along the line
/// wins when it crosses a row more than once.
std::map<int, Eigen::Vector2d> resample_rows(const Polyline3& poly, double row_step) {
  std::map<int, Eigen::Vector2d> rows;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[i + 1];
    const double y_lo = std::min(p.y(), q.y());
    const double y_hi = std::max(p.y(), q.y());
    if (y_hi == y_lo) continue;
    int r = static_cast<int>(std::ceil(y_lo / row_step - 0.5));
    for (;; ++r) {
      const double yc = (r + 0.5) * row_step;
      if (yc < y_lo) continue;
      if (yc >= y_hi) break;
      if (!rows.count(r)) {
        const double alpha = (yc - p.y()) / (q.y() - p.y());
        rows[r] = {p.x() + alpha * (q.x() - p.x()), p.z() + alpha * (q.z() - p.z())};
      }
    }
  }
  return rows;
}

/// Minimal-cost perfect matching on a square cost matrix (Hungarian,
/// potentials formulation, O(n^3)). Returns for each column the assigned row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_of_col(n, -1);
  for (int j = 1; j <= n; ++j) row_of_col[j - 1] = p[j] - 1;
  return row_of_col;
}

}  // namespace

void MatchSpec::validate() const {
  if (!(match_threshold > 0.0)) raise(ErrorCode::invalid_argument, "match_threshold must be > 0");
  if (!(row_step > 0.0)) raise(ErrorCode::invalid_argument, "row_step must be > 0");
  if (!(near_hi > near_lo) || !(far_hi > far_lo)) {
    raise(ErrorCode::invalid_argument, "bands must be non-empty");
  }
  const bool disjoint = near_hi <= far_lo || far_hi <= near_lo;
  if (!disjoint) raise(ErrorCode::invalid_argument, "near and far bands must be disjoint");
}

Assignment match(const std::vector<Polyline3>& pred, const std::vector<Polyline3>& gt,
                 const MatchSpec& spec) {
  spec.validate();
  const std::size_t np = pred.size();
  const std::size_t ng = gt.size();

  std::vector<std::map<int, Eigen::Vector2d>> pred_rows(np), gt_rows(ng);
  for (std::size_t i = 0; i < np; ++i) pred_rows[i] = resample_rows(pred[i], spec.row_step);
  for (std::size_t j = 0; j < ng; ++j) gt_rows[j] = resample_rows(gt[j], spec.row_step);

  struct Cand {
    double cost;
    std::vector<RowSample> rows;
  };
  std::vector<std::vector<Cand>> cand(np, std::vector<Cand>(ng));
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < ng; ++j) {
      double sum = 0.0;
      std::vector<RowSample> rows;
      for (const auto& [row, pxz] : pred_rows[i]) {
        const auto it = gt_rows[j].find(row);
        if (it == gt_rows[j].end()) continue;
        RowSample s;
        s.y = (row + 0.5) * spec.row_step;
        s.x_pred = pxz.x();
        s.z_pred = pxz.y();
        s.x_gt = it->second.x();
        s.z_gt = it->second.y();
        sum += std::abs(s.x_pred - s.x_gt);
        rows.push_back(s);
      }
      if (rows.empty()) {
        cand[i][j].cost = kIncompatible;
      } else {
        const double mean = sum / static_cast<double>(rows.size());
        cand[i][j].cost = mean <= spec.match_threshold ? mean : kIncompatible;
        cand[i][j].rows = std::move(rows);
      }
    }
  }

  // Square padding with the incompatible sentinel; the sentinel dwarfs any
  // feasible total, so minimizing cost maximizes compatible matches first.
  const std::size_t n = std::max(np, ng);
  Assignment out;
  if (n > 0) {
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, kIncompatible));
    for (std::size_t i = 0; i < np; ++i) {
      for (std::size_t j = 0; j < ng; ++j) cost[i][j] = cand[i][j].cost;
    }
    const std::vector<int> row_of_col = hungarian(cost);
    std::vector<bool> pred_matched(np, false), gt_matched(ng, false);
    for (std::size_t j = 0; j < ng; ++j) {
      const int i = row_of_col[j];
      if (i < 0 || static_cast<std::size_t>(i) >= np) continue;
      if (cand[i][j].cost >= kIncompatible) continue;
      MatchedPair pair;
      pair.pred_index = static_cast<std::size_t>(i);
      pair.gt_index = j;
      pair.mean_abs_dx = cand[i][j].cost;
      pair.rows = cand[i][j].rows;
      out.matches.push_back(std::move(pair));
      pred_matched[i] = true;
      gt_matched[j] = true;
    }
    std::sort(out.matches.begin(), out.matches.end(),
              [](const auto& a, const auto& b) { return a.pred_index < b.pred_index; });
    for (std::size_t i = 0; i < np; ++i) {
      if (!pred_matched[i]) out.unmatched_pred.push_back(i);
    }
    for (std::size_t j = 0; j < ng; ++j) {
      if (!gt_matched[j]) out.unmatched_gt.push_back(j);
    }
  }
  return out;
}

void MetricsAccumulator::add(const Assignment& assignment, const MatchSpec& spec) {
  tp_ += assignment.matches.size();
  fp_ += assignment.unmatched_pred.size();
  fn_ += assignment.unmatched_gt.size();
  for (const auto& pair : assignment.matches) {
    for (const auto& row : pair.rows) {
      int band = -1;
      if (row.y >= spec.near_lo && row.y < spec.near_hi) band = 0;
      if (row.y >= spec.far_lo && row.y < spec.far_hi) band = 1;
      if (band < 0) continue;
      sum_dx_[band] += std::abs(row.x_pred - row.x_gt);
      sum_dz_[band] += std::abs(row.z_pred - row.z_gt);
      n_rows_[band] += 1;
    }
  }
}

void MetricsAccumulator::merge(const MetricsAccumulator& other) {
  tp_ += other.tp_;
  fp_ += other.fp_;
  fn_ += other.fn_;
  for (int b = 0; b < 2; ++b) {
    sum_dx_[b] += other.sum_dx_[b];
    sum_dz_[b] += other.sum_dz_[b];
    n_rows_[b] += other.n_rows_[b];
  }
}

MetricsReport MetricsAccumulator::report() const {
  MetricsReport r;
  r.tp = tp_;
  r.fp = fp_;
  r.fn = fn_;
  harmonic_f1(r);
  if (n_rows_[0] > 0) {
    r.x_err_near = sum_dx_[0] / static_cast<double>(n_rows_[0]);
    r.z_err_near = sum_dz_[0] / static_cast<double>(n_rows_[0]);
  }
  if (n_rows_[1] > 0) {
    r.x_err_far = sum_dx_[1] / static_cast<double>(n_rows_[1]);
    r.z_err_far = sum_dz_[1] / static_cast<double>(n_rows_[1]);
  }
  return r;
}

MetricsReport score(const Assignment& assignment, const MatchSpec& spec) {
  MetricsAccumulator acc;
  acc.add(assignment, spec);
  return acc.report();
}

}  // namespace clf::eval
