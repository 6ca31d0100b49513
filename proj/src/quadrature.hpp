#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace nmk::detail {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

// Sorted, deduplicated breakpoints clipped to [lo, hi] with both ends included.
inline std::vector<double> make_breakpoints(std::vector<double> pts, double lo, double hi) {
  pts.push_back(lo);
  pts.push_back(hi);
  std::vector<double> out;
  out.reserve(pts.size());
  for (double p : pts)
    if (std::isfinite(p) && p >= lo && p <= hi) out.push_back(p);
  std::sort(out.begin(), out.end());
  const double eps = 1e-15 * std::max(std::abs(lo), std::abs(hi));
  out.erase(std::unique(out.begin(), out.end(),
                        [eps](double a, double b) { return std::abs(a - b) <= eps; }),
            out.end());
  return out;
}

// Points c +- s * ratio^k (k = 0..) out to distance `reach`.
inline void add_geometric(std::vector<double>& pts, double c, double s, double reach,
                          double ratio = 4.0) {
  if (!(s > 0.0) || !std::isfinite(s)) return;
  pts.push_back(c);
  for (double d = s; d < reach; d *= ratio) {
    pts.push_back(c - d);
    pts.push_back(c + d);
  }
}

namespace quad_impl {
template <class F>
void adapt(F& f, double a, double b, double abs_tol, double rel_tol, unsigned depth,
           QuadResult& acc) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0;
  double l1 = 0.0;
  const double v = GK::integrate(f, a, b, 0, 0.0, &err, &l1);
  if (depth == 0 || err <= std::max(abs_tol, rel_tol * l1)) {
    acc.value += v;
    acc.error += err;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt(f, a, m, 0.5 * abs_tol, rel_tol, depth - 1, acc);
  adapt(f, m, b, 0.5 * abs_tol, rel_tol, depth - 1, acc);
}
}  // namespace quad_impl

// Adaptive 31-point Gauss-Kronrod on every panel between consecutive breakpoints.
// A panel is accepted when its error estimate is below the larger of rel_tol
// times its L1 norm and its share of abs_tol.
template <class F>
QuadResult integrate_panels(F&& f, const std::vector<double>& bp, double rel_tol = 1e-10,
                            double abs_tol = 1e-12, unsigned max_depth = 14) {
  QuadResult r;
  if (bp.size() < 2) return r;
  const double share = abs_tol / static_cast<double>(bp.size() - 1);
  for (std::size_t i = 0; i + 1 < bp.size(); ++i)
    quad_impl::adapt(f, bp[i], bp[i + 1], share, rel_tol, max_depth, r);
  return r;
}

}  // namespace nmk::detail
