#include "nmkerr/noise.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "nmkerr/errors.hpp"
#include "quadrature.hpp"

namespace nmk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

// Frequency scale of the linearized problem: detuning, Kerr shift and loss.
double problem_scale(const LinearizedPoint& pt) {
  return std::abs(pt.omega_ap) + 3.0 * pt.beta_n() + pt.system.kernel.mean_loss() +
         std::abs(pt.Omega);
}

cplx M_at(const LinearizedPoint& pt, double w) { return fluctuation_kernel(pt, w).M; }

struct Peak {
  double omega = 0.0;
  double width = 0.0;
};

// Local minima of |M| on omega > 0, refined with Brent, smallest first.
std::vector<Peak> find_peaks(const LinearizedPoint& pt, double reach) {
  const double s = problem_scale(pt);
  const int n_lin = 600;
  const int n_log = 300;
  std::vector<double> grid;
  grid.reserve(n_lin + n_log + 1);
  for (int i = 1; i <= n_lin; ++i) grid.push_back(reach * i / n_lin);
  const double lo = 1e-7 * s;
  for (int i = 0; i < n_log; ++i) grid.push_back(lo * std::pow(reach / lo, double(i) / n_log));
  std::sort(grid.begin(), grid.end());
  grid.insert(grid.begin(), 0.0);

  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) g[i] = std::abs(M_at(pt, grid[i]));

  std::vector<Peak> peaks;
  auto absM = [&](double w) { return std::abs(M_at(pt, w)); };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool left = i == 0 || g[i] <= g[i - 1];
    const bool right = i + 1 == grid.size() || g[i] <= g[i + 1];
    if (!(left && right)) continue;
    double w = grid[i];
    if (i > 0 && i + 1 < grid.size()) {
      auto r = boost::math::tools::brent_find_minima(absM, grid[i - 1], grid[i + 1], 52);
      w = r.first;
    }
    const auto fk = fluctuation_kernel(pt, w);
    const double gam = std::abs(fk.Gamma2);
    const double width = gam / (2.0 * std::max(w, std::sqrt(gam) + 1e-300));
    peaks.push_back({w, std::max(width, 1e-12 * s)});
  }
  std::sort(peaks.begin(), peaks.end(), [&](const Peak& a, const Peak& b) {
    return std::abs(M_at(pt, a.omega)) < std::abs(M_at(pt, b.omega));
  });
  if (peaks.size() > 4) peaks.resize(4);
  return peaks;
}

struct Window {
  double W = 0.0;
  std::vector<double> breakpoints;
};

Window build_window(const LinearizedPoint& pt, const NoiseQuadConfig& cfg) {
  const KernelModel& k = pt.system.kernel;
  const double kbar = k.mean_loss();
  const double s = problem_scale(pt);
  const double wp = pt.drive.omega_p;

  const auto period = k.period();
  double reach = 4.0 * s;
  for (double f : k.feature_frequencies(wp - 4.0 * s, wp + 4.0 * s))
    reach = std::max(reach, 2.0 * std::abs(f - wp));
  if (period) reach = std::min(std::max(reach, 0.5 * *period), 4.0 * *period);

  Window win;
  double W = std::max({10.0 * std::abs(pt.Omega.real()), 100.0 * kbar, 10.0 * reach});
  if (period) {
    W = std::max(W, cfg.min_periods * *period);
    W = std::ceil(W / *period) * *period;
  } else {
    W = std::max(W, 2.0 * kbar / (kPi * 0.1 * cfg.abs_tol));
    W = std::min(W, 1e9 * s);
  }
  win.W = W;

  std::vector<double> pts;
  detail::add_geometric(pts, 0.0, std::max(0.25 * std::min(kbar, s), 1e-9 * s), W);
  for (const auto& p : find_peaks(pt, reach)) {
    for (double sign : {-1.0, 1.0}) {
      const double c = sign * p.omega;
      pts.push_back(c);
      for (double m : {1.0, 4.0, 16.0, 64.0}) {
        pts.push_back(c - m * p.width);
        pts.push_back(c + m * p.width);
      }
    }
  }
  const double fs = k.feature_scale();
  for (double f : k.feature_frequencies(wp - W, wp + W)) {
    for (double c : {f - wp, wp - f}) {
      if (period) {
        pts.push_back(c);
        for (double d = 0.25 * fs; d < 0.5 * *period; d *= 4.0) {
          pts.push_back(c - d);
          pts.push_back(c + d);
        }
      } else {
        detail::add_geometric(pts, c, 0.25 * std::min(fs, s), W);
      }
    }
  }
  win.breakpoints = detail::make_breakpoints(std::move(pts), -W, W);
  return win;
}

double integrand(const LinearizedPoint& pt, int sigma, double w) {
  const auto fk = fluctuation_kernel(pt, w);
  const double shift = pt.omega_ap + (2.0 - sigma) * pt.beta_n() + fk.delta_minus + w;
  const double num = fk.kappa_plus * (shift * shift + fk.kappa_minus * fk.kappa_minus);
  return num / std::norm(fk.M) / kPi;
}

void require_stable(const LinearizedPoint& pt) {
  const auto wr = count_unstable_roots(pt);
  if (M_at(pt, 0.0).real() < 0.0)
    throw NumericalError("unstable_point", "unstable point: inside the saddle band");
  if (wr.singular || wr.unstable_roots > 0)
    throw NumericalError("diverges", "noise diverges: instability boundary");
}

double ridders(const std::function<double(double)>& f, double x, double h0) {
  constexpr int ntab = 10;
  constexpr double con = 1.4, con2 = con * con;
  double a[ntab][ntab];
  double h = h0;
  a[0][0] = (f(x + h) - f(x - h)) / (2.0 * h);
  double best = a[0][0];
  double err = std::numeric_limits<double>::max();
  for (int i = 1; i < ntab; ++i) {
    h /= con;
    a[0][i] = (f(x + h) - f(x - h)) / (2.0 * h);
    double fac = con2;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
      fac *= con2;
      const double e = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
      if (e <= err) {
        err = e;
        best = a[j][i];
      }
    }
    if (std::abs(a[i][i] - a[i - 1][i - 1]) >= 2.0 * err) break;
  }
  return best;
}

}  // namespace

LinearizedPoint linearize(const SystemParams& system, double omega_p, double n) {
  LinearizedPoint pt;
  pt.system = system;
  pt.n = n;
  pt.drive = {omega_p, n > 0.0 ? pump_for_n(system, omega_p, n) : 0.0};
  pt.omega_ap = system.omega_a - omega_p;
  pt.Delta = pt.omega_ap + 2.0 * system.beta * n;
  const double bn = system.beta * n;
  pt.Omega = std::sqrt(cplx(pt.Delta * pt.Delta - bn * bn, 0.0));
  return pt;
}

LinearizedPoint linearize(const SystemParams& system, const Drive& drive, const SteadyState& root) {
  LinearizedPoint pt = linearize(system, drive.omega_p, root.n);
  pt.drive = drive;
  return pt;
}

FluctuationKernel fluctuation_kernel(const LinearizedPoint& pt, double omega) {
  FluctuationKernel fk;
  fk.omega = omega;
  const double wp = pt.drive.omega_p;
  const double bn = pt.beta_n();
  const cplx kp = pt.system.kernel.loss(wp + omega);
  const cplx km = pt.system.kernel.loss(wp - omega);
  fk.kappa_plus = kp.real();
  fk.kappa_minus = km.real();
  fk.delta_plus = kp.imag();
  fk.delta_minus = km.imag();
  fk.eta_plus = I * (pt.omega_ap - omega + 2.0 * bn) + kp;
  fk.eta_minus_conj = std::conj(I * (pt.omega_ap + omega + 2.0 * bn) + km);
  fk.M = fk.eta_plus * fk.eta_minus_conj - bn * bn;

  const double wap = pt.omega_ap;
  const double dp = fk.delta_plus, dm = fk.delta_minus;
  fk.Omega2 = 3.0 * bn * bn + (wap + dm) * (wap + dp) + 2.0 * bn * (2.0 * wap + dp + dm) +
              (dp - dm) * omega + fk.kappa_plus * fk.kappa_minus;
  fk.Gamma2 = 2.0 * bn * (fk.kappa_minus - fk.kappa_plus) +
              fk.kappa_minus * (wap + dp - omega) - fk.kappa_plus * (wap + dm + omega);
  return fk;
}

std::pair<cplx, cplx> transfer_pq(const LinearizedPoint& pt, double omega) {
  const auto fk = fluctuation_kernel(pt, omega);
  const double scale = problem_scale(pt);
  if (std::abs(fk.M) <= 1e-14 * scale * scale)
    throw NumericalError("singular", "singular response: M(omega) = 0");
  const cplx kc = pt.system.kernel.coupling(pt.drive.omega_p + omega);
  return {fk.eta_minus_conj * kc / fk.M, I * pt.beta_n() * kc / fk.M};
}

WindingResult count_unstable_roots(const LinearizedPoint& pt) {
  const Window win = build_window(pt, NoiseQuadConfig{});
  const double s = problem_scale(pt);

  WindingResult res;
  res.min_abs_m = std::numeric_limits<double>::infinity();
  double total = 0.0;

  auto track = [&](double w, cplx m) {
    const double a = std::abs(m);
    if (a < res.min_abs_m) {
      res.min_abs_m = a;
      res.omega_at_min = w;
    }
  };

  // Arg increment between a and b, subdividing until each step is below pi/4.
  std::function<double(double, cplx, double, cplx, int)> step =
      [&](double a, cplx ma, double b, cplx mb, int depth) -> double {
    const double d = std::arg(mb / ma);
    if (std::abs(d) < kPi / 4.0 || depth > 40 || b - a <= 1e-15 * (std::abs(a) + std::abs(b)))
      return d;
    const double c = 0.5 * (a + b);
    const cplx mc = M_at(pt, c);
    track(c, mc);
    return step(a, ma, c, mc, depth + 1) + step(c, mc, b, mb, depth + 1);
  };

  // Densify so that comb kernels and narrow peaks are sampled between breakpoints.
  std::vector<double> xs;
  const auto& bp = win.breakpoints;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    xs.push_back(bp[i]);
    for (int j = 1; j < 4; ++j) xs.push_back(bp[i] + (bp[i + 1] - bp[i]) * j / 4.0);
  }
  xs.push_back(bp.back());

  cplx prev = M_at(pt, xs[0]);
  track(xs[0], prev);
  // Closing arcs from -inf to -W and from W to +inf, where M ~ -omega^2.
  total += std::arg(prev / cplx(-1.0, 0.0));
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const cplx cur = M_at(pt, xs[i]);
    track(xs[i], cur);
    total += step(xs[i - 1], prev, xs[i], cur, 0);
    prev = cur;
  }
  total += std::arg(cplx(-1.0, 0.0) / prev);

  res.unstable_roots = static_cast<int>(std::lround(1.0 + total / (2.0 * kPi)));
  res.singular = res.min_abs_m <= 1e-13 * s * s;
  return res;
}

double quadrature_variance_exact(const LinearizedPoint& pt, int sigma,
                                 const NoiseQuadConfig& cfg) {
  if (sigma != 1 && sigma != -1) throw ConfigError("quadrature sigma must be +1 or -1");
  require_stable(pt);
  const Window win = build_window(pt, cfg);
  const auto q = detail::integrate_panels([&](double w) { return integrand(pt, sigma, w); },
                                          win.breakpoints, cfg.panel_rel_tol, 0.01 * cfg.abs_tol);
  const double tail = 2.0 * pt.system.kernel.mean_loss() / (kPi * win.W);
  if (tail > 1e-4) throw NumericalError("nonconvergence", "noise integral tail exceeds 1e-4");
  return q.value + tail;
}

NoiseResult variance_exact(const LinearizedPoint& pt, const NoiseQuadConfig& cfg) {
  if (!(pt.system.kernel.mean_loss() > 0.0))
    throw ConfigError("noise: model has no loss");
  require_stable(pt);
  const Window win = build_window(pt, cfg);
  NoiseResult r;
  r.method = NoiseMethod::ExactIntegral;
  const double tail = 2.0 * pt.system.kernel.mean_loss() / (kPi * win.W);
  if (tail > 1e-4) throw NumericalError("nonconvergence", "noise integral tail exceeds 1e-4");
  const auto qx = detail::integrate_panels([&](double w) { return integrand(pt, 1, w); },
                                           win.breakpoints, cfg.panel_rel_tol, 0.01 * cfg.abs_tol);
  const auto qy = detail::integrate_panels([&](double w) { return integrand(pt, -1, w); },
                                           win.breakpoints, cfg.panel_rel_tol, 0.01 * cfg.abs_tol);
  r.var_x = qx.value + tail;
  r.var_y = qy.value + tail;
  r.fano = r.var_x;
  r.error_estimate = std::max(qx.error, qy.error);
  if (!std::isfinite(r.var_x) || !std::isfinite(r.var_y))
    throw NumericalError("diverges", "noise diverges: instability boundary");
  return r;
}

NoiseResult variance_adiabatic(const LinearizedPoint& pt) {
  const double bn = pt.beta_n();
  const double D = pt.Delta;
  const double om2 = D * D - bn * bn;
  if (!(om2 > 0.0))
    throw NumericalError("unstable_point", "unstable point: Omega is imaginary (saddle band)");
  const double Om = std::sqrt(om2);
  const double wp = pt.drive.omega_p;
  const KernelModel& k = pt.system.kernel;
  const double kp = k.loss(wp + Om).real();
  const double km = k.loss(wp - Om).real();
  if (!(kp + km > 0.0)) throw NumericalError("unstable_point", "no loss at the sidebands");
  const double r = (kp - km) / (kp + km);
  const double x = D / Om;
  const double den = 1.0 + r * x;
  if (!(den > 0.0))
    throw NumericalError("mi_criterion", "adiabatic MI criterion violated: 1 + r Delta/Omega <= 0");

  NoiseResult res;
  res.method = NoiseMethod::Adiabatic;
  const double ratio = (x * x + r * x) / den;
  res.var_x = (1.0 - bn / D) * ratio;
  res.var_y = (1.0 + bn / D) * ratio;
  res.fano = res.var_x;
  res.gamma2 = std::abs(D * (km - kp) - Om * (km + kp));
  const double lw = k.loss(wp).real();
  res.adiabatic_advisory = k.feature_scale() < 10.0 * lw;
  return res;
}

double sharp_loss_slope(const SystemParams& system, double omega_p) {
  const KernelModel& k = system.kernel;
  const double kl = k.loss(omega_p).real();
  if (!(kl > 0.0)) throw NumericalError("zero_loss", "zero loss point: K_l'(omega_p) = 0");
  double h = k.feature_scale();
  if (!std::isfinite(h)) return 0.0;
  for (double f : k.feature_frequencies(omega_p - 10.0 * h, omega_p + 10.0 * h))
    h = std::min(h, std::abs(f - omega_p));
  h *= 0.1;
  if (!(h > 0.0)) throw NumericalError("zero_loss", "zero loss point: K_l'(omega_p) = 0");
  return ridders([&](double w) { return k.loss(w).real(); }, omega_p, h) / kl;
}

std::vector<SpectrumSample> noise_spectrum(const LinearizedPoint& pt,
                                           std::span<const double> omegas) {
  std::vector<SpectrumSample> out;
  out.reserve(omegas.size());
  for (double w : omegas) {
    // 2 pi * integrand is |p +- q|^2 summed over the radiative and background inputs.
    out.push_back({w, 2.0 * kPi * integrand(pt, 1, w), 2.0 * kPi * integrand(pt, -1, w)});
  }
  return out;
}

double noise_peak_frequency(const LinearizedPoint& pt) {
  const KernelModel& k = pt.system.kernel;
  const double s = problem_scale(pt);
  double reach = 4.0 * s;
  if (auto P = k.period()) reach = std::min(reach, 2.0 * *P);
  const auto peaks = find_peaks(pt, reach);
  return peaks.empty() ? 0.0 : peaks.front().omega;
}

}  // namespace nmk
