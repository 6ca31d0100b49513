#include "nmkerr/steadystate.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "nmkerr/errors.hpp"
#include "nmkerr/parallel.hpp"

namespace nmk {

namespace {

constexpr cplx I{0.0, 1.0};

struct CubicCoeffs {
  double D = 0.0;  // omega_ap + K_l''(omega_p)
  double L = 0.0;  // K_l'(omega_p)
  double P = 0.0;  // flux |K_c(omega_p)|^2
};

CubicCoeffs coeffs(const SystemParams& sys, const Drive& drive) {
  const cplx kl = sys.kernel.loss(drive.omega_p);
  const double kc2 = std::norm(sys.kernel.coupling(drive.omega_p));
  return {sys.omega_a - drive.omega_p + kl.imag(), kl.real(), drive.flux * kc2};
}

// Roots u >= 0 of u^3 + 2D u^2 + (D^2 + L^2) u - c = 0, with u = beta n.
std::vector<double> kerr_cubic_roots(double D, double L, double c) {
  double s = std::max(std::abs(D), std::abs(L));
  if (s == 0.0) s = std::cbrt(c);
  if (s == 0.0) return {0.0};
  const double a2 = 2.0 * D / s;
  const double a1 = (D * D + L * L) / (s * s);
  const double a0 = -c / (s * s * s);

  Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
  comp(0, 0) = -a2;
  comp(0, 1) = -a1;
  comp(0, 2) = -a0;
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix3d> es(comp, false);
  const auto ev = es.eigenvalues();

  double vmax = 0.0;
  for (int i = 0; i < 3; ++i) vmax = std::max(vmax, std::abs(ev[i]));

  auto f = [&](double v) { return ((v + a2) * v + a1) * v + a0; };
  auto df = [&](double v) { return (3.0 * v + 2.0 * a2) * v + a1; };

  std::vector<double> out;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(ev[i].imag()) >= 1e-8 * vmax) continue;
    double v = ev[i].real();
    for (int it = 0; it < 4; ++it) {
      const double d = df(v);
      if (d == 0.0) break;
      const double vn = v - f(v) / d;
      if (!std::isfinite(vn) || std::abs(f(vn)) >= std::abs(f(v))) break;
      v = vn;
    }
    if (v < 0.0) {
      if (v < -1e-12 * std::max(vmax, 1.0)) continue;
      v = 0.0;
    }
    out.push_back(v * s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SteadyState make_state(const SystemParams& sys, double omega_p, double n) {
  SteadyState st;
  st.n = n;
  st.omega_ap = sys.omega_a - omega_p;
  st.alpha0 = cplx(std::sqrt(n), 0.0);
  const cplx kl = sys.kernel.loss(omega_p);
  const cplx kc = sys.kernel.coupling(omega_p);
  // alpha0 = s0 K_c / (i(omega_ap + beta n) + K_l); pick arg(s0) so alpha0 > 0.
  const cplx transfer = kc / (I * (st.omega_ap + sys.beta * n) + kl);
  st.pump_phase = std::abs(transfer) > 0.0 ? -std::arg(transfer) : 0.0;
  return st;
}

}  // namespace

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Stable:
      return "stable";
    case Stability::SaddleUnstable:
      return "saddle";
    case Stability::MIUnstable:
      return "mi";
    case Stability::Unknown:
      break;
  }
  return "unknown";
}

std::vector<SteadyState> steady_roots(const SystemParams& system, const Drive& drive) {
  system.validate();
  if (!(drive.flux >= 0.0) || !std::isfinite(drive.flux))
    throw ConfigError("drive flux must be >= 0");
  if (!std::isfinite(drive.omega_p)) throw ConfigError("pump frequency must be finite");

  const CubicCoeffs c = coeffs(system, drive);
  std::vector<double> ns;
  if (drive.flux == 0.0 || c.P == 0.0) {
    ns.push_back(0.0);
  } else if (system.beta == 0.0) {
    const double den = c.D * c.D + c.L * c.L;
    if (den == 0.0)
      throw NumericalError("unbounded", "lossless resonant linear cavity has no steady state");
    ns.push_back(c.P / den);
  } else {
    for (double u : kerr_cubic_roots(c.D, c.L, system.beta * c.P)) ns.push_back(u / system.beta);
    if (ns.empty()) ns.push_back(0.0);
  }

  std::vector<SteadyState> out;
  out.reserve(ns.size());
  for (double n : ns) out.push_back(make_state(system, drive.omega_p, n));
  return out;
}

double pump_for_n(const SystemParams& system, double omega_p, double n) {
  system.validate();
  if (!(n >= 0.0) || !std::isfinite(n)) throw ConfigError("photon number must be >= 0");
  const cplx kl = system.kernel.loss(omega_p);
  const double kc2 = std::norm(system.kernel.coupling(omega_p));
  if (kc2 <= 1e-20 * 2.0 * system.kernel.rate_scale())
    throw NumericalError("uncoupled", "uncoupled pump frequency: |K_c(omega_p)|^2 = 0");
  const double det = system.omega_a - omega_p + system.beta * n + kl.imag();
  return n * (det * det + kl.real() * kl.real()) / kc2;
}

SteadyState steady_state_at(const SystemParams& system, double omega_p, double n) {
  system.validate();
  if (!(n >= 0.0) || !std::isfinite(n)) throw ConfigError("photon number must be >= 0");
  return make_state(system, omega_p, n);
}

BistabilityInfo bistability_threshold(const SystemParams& system, double omega_p) {
  system.validate();
  if (system.beta == 0.0) throw ConfigError("linear cavity cannot be bistable");
  const cplx kl = system.kernel.loss(omega_p);
  BistabilityInfo b;
  b.delta = omega_p - system.omega_a - kl.imag();
  b.threshold = std::sqrt(3.0) * kl.real();
  b.bistable = b.delta > b.threshold;
  return b;
}

BranchSweep sweep_input_output(const SystemParams& system, double omega_p,
                               std::span<const double> flux_grid, unsigned threads) {
  for (std::size_t i = 1; i < flux_grid.size(); ++i)
    if (!(flux_grid[i] >= flux_grid[i - 1])) throw ConfigError("flux grid must be ascending");

  BranchSweep sw;
  sw.omega_p = omega_p;
  sw.points.resize(flux_grid.size());
  parallel_for(flux_grid.size(), threads, [&](std::size_t i) {
    sw.points[i] = {flux_grid[i], steady_roots(system, {omega_p, flux_grid[i]})};
  });

  auto count = [&](double f) { return steady_roots(system, {omega_p, f}).size(); };
  for (std::size_t i = 1; i < sw.points.size(); ++i) {
    const std::size_t c0 = sw.points[i - 1].roots.size();
    const std::size_t c1 = sw.points[i].roots.size();
    if (c0 == c1) continue;
    double lo = sw.points[i - 1].flux;
    double hi = sw.points[i].flux;
    while (hi - lo > 1e-9 * hi) {
      const double mid = 0.5 * (lo + hi);
      if (count(mid) == c0)
        lo = mid;
      else
        hi = mid;
    }
    sw.turning_points.push_back(0.5 * (lo + hi));
  }
  return sw;
}

}  // namespace nmk
