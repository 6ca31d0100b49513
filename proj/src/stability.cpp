#include "nmkerr/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "nmkerr/errors.hpp"
#include "nmkerr/noise.hpp"
#include "nmkerr/parallel.hpp"

namespace nmk {

namespace {

// Classifies from a full eigenvalue list.
StabilityReport from_eigenvalues(std::vector<cplx> ev, double eps) {
  StabilityReport rep;
  rep.method = "eigen";
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return a.real() > b.real(); });
  rep.eigenvalues = ev;
  rep.re_lambda_max = ev.empty() ? 0.0 : ev.front().real();

  bool saddle = false;
  double best_pair_re = -std::numeric_limits<double>::infinity();
  for (const cplx& l : ev) {
    const bool complex_pair = std::abs(l.imag()) >= eps;
    if (!complex_pair && l.real() > eps) saddle = true;
    if (complex_pair && l.real() > best_pair_re) {
      best_pair_re = l.real();
      rep.im_lambda = std::abs(l.imag());
    }
  }
  rep.pulse_freq = rep.im_lambda;
  if (saddle) {
    rep.cls = Stability::SaddleUnstable;
  } else if (best_pair_re > eps) {
    rep.cls = Stability::MIUnstable;
  } else {
    rep.cls = Stability::Stable;
  }
  if (best_pair_re > 0.0) rep.mi_gain = best_pair_re;
  return rep;
}

struct AdiabaticParts {
  double Delta = 0.0;
  double Omega = 0.0;
  double kp = 0.0, km = 0.0;
};

AdiabaticParts adiabatic_parts(const SystemParams& system, double omega_p, double n) {
  const double bn = system.beta * n;
  AdiabaticParts a;
  a.Delta = system.omega_a - omega_p + 2.0 * bn;
  const double om2 = a.Delta * a.Delta - bn * bn;
  if (!(om2 > 0.0)) throw NumericalError("unstable_point", "inside saddle band: Omega is imaginary");
  a.Omega = std::sqrt(om2);
  a.kp = system.kernel.loss(omega_p + a.Omega).real();
  a.km = system.kernel.loss(omega_p - a.Omega).real();
  return a;
}

}  // namespace

FluctuationMatrix fw_matrix(const SystemParams& system, double omega_p, double n) {
  const auto* fw = std::get_if<FriedrichWintgen>(&system.kernel.core());
  if (!fw) throw ConfigError("fw_matrix requires a Friedrich-Wintgen kernel");
  const double ka = fw->kappa + system.kernel.background();
  const double g = fw->gamma;
  const double c = std::sqrt(fw->kappa * g);
  const double bn = system.beta * n;
  const double wap = system.omega_a - omega_p;
  const double wdp = fw->omega_d - omega_p;
  FluctuationMatrix A;
  // clang-format off
  A << -ka,            wap + bn, -c,   0.0,
       -wap - 3.0 * bn, -ka,      0.0,  -c,
       -c,              0.0,      -g,   wdp,
        0.0,           -c,        -wdp, -g;
  // clang-format on
  return A;
}

double default_epsilon(const SystemParams& system) {
  const KernelModel& k = system.kernel;
  if (const auto* fw = std::get_if<FriedrichWintgen>(&k.core()))
    return 1e-6 * (fw->kappa + fw->gamma + k.background());
  return 1e-6 * k.rate_scale();
}

StabilityReport classify(const SystemParams& system, double omega_p, double n,
                         std::optional<double> epsilon) {
  system.validate();
  const double eps = epsilon.value_or(default_epsilon(system));
  const KernelModel& k = system.kernel;

  if (k.is<FriedrichWintgen>()) {
    Eigen::EigenSolver<FluctuationMatrix> es(fw_matrix(system, omega_p, n), false);
    std::vector<cplx> ev(4);
    for (int i = 0; i < 4; ++i) ev[i] = es.eigenvalues()[i];
    return from_eigenvalues(std::move(ev), eps);
  }

  if (const auto* mk = std::get_if<Markovian>(&k.core())) {
    // Flat loss: the two-quadrature matrix is exact.
    const double g = mk->gamma + k.background();
    const double bn = system.beta * n;
    const double wap = system.omega_a - omega_p;
    Eigen::Matrix2d A;
    A << -g, wap + bn, -wap - 3.0 * bn, -g;
    Eigen::EigenSolver<Eigen::Matrix2d> es(A, false);
    return from_eigenvalues({es.eigenvalues()[0], es.eigenvalues()[1]}, eps);
  }

  StabilityReport rep;
  const LinearizedPoint pt = linearize(system, omega_p, n);
  if (fluctuation_kernel(pt, 0.0).M.real() < 0.0) {
    // A real zero of M on the positive imaginary axis: a real growing eigenvalue.
    rep.cls = Stability::SaddleUnstable;
    rep.method = "adiabatic";
    rep.re_lambda_max = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  const double bn = system.beta * n;
  const double D = pt.Delta;
  if (D * D - bn * bn > 0.0) {
    const auto a = adiabatic_parts(system, omega_p, n);
    const double re = -(a.kp + a.km) / 2.0 - (a.Delta / a.Omega) * (a.kp - a.km) / 2.0;
    rep.method = "adiabatic";
    rep.re_lambda_max = re;
    rep.im_lambda = std::sqrt(std::max(a.Omega * a.Omega - re * re, 0.0));
    rep.pulse_freq = rep.im_lambda;
    rep.mi_gain = std::max(re, 0.0);
    rep.cls = re > eps ? Stability::MIUnstable : Stability::Stable;
    return rep;
  }
  // Thin band where the kernel shift keeps M(0) > 0 although Omega is imaginary.
  const auto wr = count_unstable_roots(pt);
  rep.method = "winding";
  rep.re_lambda_max = std::numeric_limits<double>::quiet_NaN();
  rep.cls = wr.unstable_roots > 0 ? Stability::MIUnstable : Stability::Stable;
  return rep;
}

double adiabatic_re_lambda(const SystemParams& system, double omega_p, double n) {
  const auto a = adiabatic_parts(system, omega_p, n);
  return -(a.kp + a.km) / 2.0 - (a.Delta / a.Omega) * (a.kp - a.km) / 2.0;
}

double adiabatic_mi_margin(const SystemParams& system, double omega_p, double n) {
  const auto a = adiabatic_parts(system, omega_p, n);
  const double sum = a.kp + a.km;
  if (!(sum > 0.0)) throw NumericalError("zero_loss", "no loss at the sidebands");
  return 1.0 + (a.Delta / a.Omega) * (a.kp - a.km) / sum;
}

PhaseDiagram phase_diagram(const SystemParams& system, std::span<const double> omega_p_grid,
                           std::span<const double> n_grid, unsigned threads,
                           std::optional<double> epsilon) {
  auto ascending = [](std::span<const double> g) {
    for (std::size_t i = 1; i < g.size(); ++i)
      if (!(g[i] > g[i - 1])) return false;
    return true;
  };
  if (!ascending(omega_p_grid) || !ascending(n_grid))
    throw ConfigError("phase diagram grids must be strictly ascending");

  PhaseDiagram pd;
  pd.omega_p.assign(omega_p_grid.begin(), omega_p_grid.end());
  pd.n.assign(n_grid.begin(), n_grid.end());
  const std::size_t nw = pd.omega_p.size();
  pd.cells.resize(nw * pd.n.size());
  parallel_for(pd.cells.size(), threads, [&](std::size_t idx) {
    const double w = pd.omega_p[idx % nw];
    const double n = pd.n[idx / nw];
    const auto rep = classify(system, w, n, epsilon);
    pd.cells[idx] = {w, n, rep.cls, rep.mi_gain, rep.re_lambda_max, rep.im_lambda};
  });
  return pd;
}

}  // namespace nmk
