#pragma once

#include <vector>

#include <Eigen/Dense>

namespace clf::labelgen {

/// Centripetal Catmull-Rom spline through a polyline, parameterized by arc
/// length. Endpoints use reflected phantom knots, so a 2-point polyline is
/// exactly its straight segment. Arc lengths come from Gauss-Legendre
/// quadrature on the per-segment cubics.
template <int N>
class CatmullRomSpline {
 public:
  using Vec = Eigen::Matrix<double, N, 1>;

  /// Knots are deduplicated (identical consecutive vertices merged); throws
  /// DegeneratePolyline when fewer than 2 distinct knots remain.
  explicit CatmullRomSpline(std::vector<Vec> knots);

  double length() const { return cumulative_.back(); }
  std::size_t knot_count() const { return knots_.size(); }
  const std::vector<Vec>& knots() const { return knots_; }

  /// Position at arc length s in [0, length()]; clamped at the ends so the
  /// exact endpoints come back at s=0 and s=length().
  Vec eval(double s) const;

  /// Arc length at which knot i sits (eval(knot_arclength(i)) == knots()[i]).
  double knot_arclength(std::size_t i) const { return cumulative_.at(i); }

  /// Samples at s = 0, step, 2*step, ...; the exact end knot is appended when
  /// the last step does not land on it.
  std::vector<Vec> sample_every(double step) const;

 private:
  struct Segment {
    Vec c0, c1, c2, c3;  // position = c0 + c1 u + c2 u^2 + c3 u^3, u in [0,1]
    double len = 0.0;
  };

  Vec segment_eval(std::size_t i, double u) const;
  double segment_arclen(std::size_t i, double u) const;  // from u=0 to u
  double solve_u(std::size_t i, double target) const;    // invert segment_arclen

  std::vector<Vec> knots_;
  std::vector<Segment> segments_;
  std::vector<double> cumulative_;  // arc length at each knot, size knots
};

using Spline2d = CatmullRomSpline<2>;
using Spline3d = CatmullRomSpline<3>;

/// Arc-length-uniform resampling of a 3D polyline along its centripetal
/// Catmull-Rom interpolant; endpoints preserved.
std::vector<Eigen::Vector3d> resample_polyline(const std::vector<Eigen::Vector3d>& polyline,
                                               double spacing);

}  // namespace clf::labelgen
