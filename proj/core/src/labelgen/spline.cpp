#include "clf/labelgen/spline.hpp"

#include <algorithm>
#include <cmath>

#include "clf/errors.hpp"

namespace clf::labelgen {

namespace {

// 16-point Gauss-Legendre nodes/weights on [0,1].
constexpr int kGaussN = 16;
constexpr double kGaussX[kGaussN] = {
    0.005299532504175031, 0.027712488463383712, 0.06718439880608412, 0.12229779582249845,
    0.19106187779867811,  0.27099161117138630,  0.35919822461037054, 0.45249374508118123,
    0.54750625491881877,  0.64080177538962946,  0.72900838882861370, 0.80893812220132189,
    0.87770220417750155,  0.93281560119391588,  0.97228751153661629, 0.99470046749582497};
constexpr double kGaussW[kGaussN] = {
    0.013576229705877047, 0.031126761969323946, 0.047579255841246392, 0.062314485627766936,
    0.074797994408288367, 0.084578259697501269, 0.091301707522461794, 0.094725305227534248,
    0.094725305227534248, 0.091301707522461794, 0.084578259697501269, 0.074797994408288367,
    0.062314485627766936, 0.047579255841246392, 0.031126761969323946, 0.013576229705877047};

}  // namespace

template <int N>
CatmullRomSpline<N>::CatmullRomSpline(std::vector<Vec> knots) {
  knots_.reserve(knots.size());
  for (const auto& k : knots) {
    if (knots_.empty() || (k - knots_.back()).norm() > 0.0) knots_.push_back(k);
  }
  if (knots_.size() < 2) {
    raise(ErrorCode::degenerate_polyline, "polyline has zero total length");
  }

  const std::size_t n = knots_.size();
  auto knot_at = [&](std::ptrdiff_t i) -> Vec {
    // Reflected phantom endpoints.
    if (i < 0) return 2.0 * knots_.front() - knots_[1];
    if (i >= static_cast<std::ptrdiff_t>(n)) return 2.0 * knots_.back() - knots_[n - 2];
    return knots_[static_cast<std::size_t>(i)];
  };

  segments_.reserve(n - 1);
  cumulative_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec p0 = knot_at(static_cast<std::ptrdiff_t>(i) - 1);
    const Vec p1 = knots_[i];
    const Vec p2 = knots_[i + 1];
    const Vec p3 = knot_at(static_cast<std::ptrdiff_t>(i) + 2);

    // Centripetal parameterization: dt = |dp|^(1/2).
    const double dt0 = std::sqrt((p1 - p0).norm());
    const double dt1 = std::sqrt((p2 - p1).norm());
    const double dt2 = std::sqrt((p3 - p2).norm());

    // Non-uniform Catmull-Rom tangents scaled to the unit segment parameter.
    const Vec m1 = dt1 * ((p1 - p0) / dt0 - (p2 - p0) / (dt0 + dt1) + (p2 - p1) / dt1);
    const Vec m2 = dt1 * ((p2 - p1) / dt1 - (p3 - p1) / (dt1 + dt2) + (p3 - p2) / dt2);

    Segment seg;
    seg.c0 = p1;
    seg.c1 = m1;
    seg.c2 = -3.0 * p1 + 3.0 * p2 - 2.0 * m1 - m2;
    seg.c3 = 2.0 * p1 - 2.0 * p2 + m1 + m2;
    seg.len = 0.0;
    for (int g = 0; g < kGaussN; ++g) {
      const double u = kGaussX[g];
      seg.len += kGaussW[g] * (seg.c1 + 2.0 * u * seg.c2 + 3.0 * u * u * seg.c3).norm();
    }
    segments_.push_back(seg);
    cumulative_[i + 1] = cumulative_[i] + seg.len;
  }
}

template <int N>
typename CatmullRomSpline<N>::Vec CatmullRomSpline<N>::segment_eval(std::size_t i,
                                                                    double u) const {
  const Segment& s = segments_[i];
  return s.c0 + u * (s.c1 + u * (s.c2 + u * s.c3));
}

template <int N>
double CatmullRomSpline<N>::segment_arclen(std::size_t i, double u) const {
  const Segment& s = segments_[i];
  double acc = 0.0;
  for (int g = 0; g < kGaussN; ++g) {
    const double x = u * kGaussX[g];
    acc += kGaussW[g] * (s.c1 + 2.0 * x * s.c2 + 3.0 * x * x * s.c3).norm();
  }
  return u * acc;
}

template <int N>
double CatmullRomSpline<N>::solve_u(std::size_t i, double target) const {
  const Segment& s = segments_[i];
  if (target <= 0.0) return 0.0;
  if (target >= s.len) return 1.0;
  double lo = 0.0, hi = 1.0;
  double u = target / s.len;
  for (int iter = 0; iter < 50; ++iter) {
    const double err = segment_arclen(i, u) - target;
    if (std::abs(err) < 1e-13 * std::max(1.0, s.len)) break;
    if (err > 0.0) {
      hi = u;
    } else {
      lo = u;
    }
    const double speed = (s.c1 + 2.0 * u * s.c2 + 3.0 * u * u * s.c3).norm();
    double next = u - err / std::max(speed, 1e-300);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    u = next;
  }
  return u;
}

template <int N>
typename CatmullRomSpline<N>::Vec CatmullRomSpline<N>::eval(double s) const {
  if (s <= 0.0) return knots_.front();
  if (s >= length()) return knots_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t seg = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const std::size_t idx = std::min(seg, segments_.size() - 1);
  return segment_eval(idx, solve_u(idx, s - cumulative_[idx]));
}

template <int N>
std::vector<typename CatmullRomSpline<N>::Vec> CatmullRomSpline<N>::sample_every(
    double step) const {
  if (!(step > 0.0)) raise(ErrorCode::invalid_argument, "sample step must be positive");
  const double total = length();
  const auto n_steps = static_cast<std::size_t>(std::floor(total / step + 1e-9));
  std::vector<Vec> samples;
  samples.reserve(n_steps + 2);
  samples.push_back(knots_.front());
  for (std::size_t k = 1; k <= n_steps; ++k) {
    samples.push_back(eval(static_cast<double>(k) * step));
  }
  if (total - static_cast<double>(n_steps) * step > 1e-9) {
    samples.push_back(knots_.back());
  } else if (n_steps >= 1) {
    samples.back() = knots_.back();
  }
  return samples;
}

template class CatmullRomSpline<2>;
template class CatmullRomSpline<3>;

std::vector<Eigen::Vector3d> resample_polyline(const std::vector<Eigen::Vector3d>& polyline,
                                               double spacing) {
  if (!(spacing > 0.0)) raise(ErrorCode::invalid_argument, "spacing must be positive");
  if (polyline.size() < 2) {
    raise(ErrorCode::degenerate_polyline, "polyline needs >= 2 vertices");
  }
  return Spline3d(polyline).sample_every(spacing);
}

}  // namespace clf::labelgen
