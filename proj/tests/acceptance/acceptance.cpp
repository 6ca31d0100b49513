// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//   acceptance [--criterion N] [--threads T]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/math/tools/minima.hpp>

#include "nmkerr/dynamics.hpp"
#include "nmkerr/errors.hpp"
#include "nmkerr/kernels.hpp"
#include "nmkerr/noise.hpp"
#include "nmkerr/parallel.hpp"
#include "nmkerr/stability.hpp"
#include "nmkerr/steadystate.hpp"

using namespace nmk;

namespace {

unsigned g_threads = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
  auto v = linspace(std::log10(a), std::log10(b), n);
  for (auto& x : v) x = std::pow(10.0, x);
  return v;
}

SystemParams fig2() { return {1.0, 1e-10, KernelModel::friedrich_wintgen(1e-4, 1e-2, 1.01)}; }

SystemParams fock_fw() { return {1.0, 1e-4, KernelModel::friedrich_wintgen(1e-4, 1e-2, 1.004)}; }

// Cavity length 5 um at omega_a = 1.03e15 rad/s, round trip 2L/c.
SystemParams fock_fano() {
  const double T = 1.03e15 * 2.0 * 5e-6 / 299792458.0;
  const double r = -0.999;
  return {1.0, 1e-4, KernelModel::fano_mirror(1e-4, r, std::sqrt(1.0 - r * r), 1, T)};
}

bool is_stable(const SystemParams& s, double wp, double n) {
  return classify(s, wp, n).cls == Stability::Stable;
}

// Lowest photon number on the upper branch that is stable: start at the upper
// turning point and walk up until the classification turns stable, then bisect.
std::optional<double> upper_stable_edge(const SystemParams& s, double wp) {
  const cplx kl = s.kernel.loss(wp);
  const double D = wp - s.omega_a - kl.imag(), L = kl.real();
  if (D * D <= 3.0 * L * L || D <= 0.0) return std::nullopt;
  double lo = (2.0 * D + std::sqrt(D * D - 3.0 * L * L)) / (3.0 * s.beta) * (1.0 + 1e-9);
  double hi = lo;
  int steps = 0;
  while (!is_stable(s, wp, hi)) {
    lo = hi;
    hi *= 1.01;
    if (++steps > 3000) return std::nullopt;
  }
  if (steps == 0) return hi;
  for (int i = 0; i < 80 && (hi - lo) > 1e-9 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (is_stable(s, wp, mid) ? hi : lo) = mid;
  }
  return hi;
}

std::optional<double> exact_var_x(const SystemParams& s, double wp, double n) {
  try {
    return variance_exact(linearize(s, wp, n)).var_x;
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  o.pass = true;
  std::ostringstream d;
  const auto grid = linspace(0.8, 1.2, 10000);
  const double T = 1.03e15 * 2.0 * 5e-6 / 299792458.0;

  const double kappa = 1e-4;
  const auto fw = KernelModel::friedrich_wintgen(kappa, 1e-2, 1.01);
  double kk = kk_residual(fw, grid) / kappa;
  for (int sigma : {1, -1})
    for (double r : {-0.999, -0.9, -0.6, 0.0, 0.6, 0.9}) {
      const auto f = KernelModel::fano_mirror(kappa, r, std::sqrt(1.0 - r * r), sigma, T);
      kk = std::max(kk, kk_residual(f, grid) / kappa);
    }
  o.pass &= kk <= 1e-10;
  d << fmt("kk/kappa=%.2e", kk);

  double worst_sum = 0.0;
  for (const auto& k : {fw, KernelModel::markovian(1e-3), KernelModel::markovian(1e-5)}) {
    const auto sr = sum_rule_check({1.0, 0.0, k});
    worst_sum = std::max(worst_sum, std::abs(sr.value - 1.0));
  }
  o.pass &= worst_sum <= 1e-3;
  d << fmt("  |sum-1|=%.2e", worst_sum);

  double causal = 0.0;
  {
    TimeKernelOptions tko;
    tko.center = 1.005;
    causal = std::max(causal, time_kernel(fw, 0.5, 8192, tko).causality_violation);
    causal = std::max(causal, time_kernel(KernelModel::markovian(1e-3), 0.5, 256, tko).causality_violation);
    tko.center = 1.0;
    const auto f = KernelModel::fano_mirror(kappa, -0.9, std::sqrt(1 - 0.81), 1, T);
    causal = std::max(causal, time_kernel(f, T / 64, 8192, tko).causality_violation);
  }
  o.pass &= causal < 1e-6;
  d << fmt("  causality=%.2e", causal);
  o.detail = d.str();
  return o;
}

Outcome criterion2() {
  const double g = 1e-4, bn = 1e3 * g;
  SystemParams s{1.0, 1e-6, KernelModel::markovian(g)};
  const double n = bn / s.beta;

  // Delta = omega_ap + 2 beta n approaches beta n from above; the exact value at
  // Delta = beta n itself has Omega = 0 and returns to the shot-noise level.
  auto var_at = [&](double lx) {
    const double Delta = bn * (1.0 + std::pow(10.0, lx));
    return exact_var_x(s, s.omega_a + 2.0 * bn - Delta, n).value_or(1e9);
  };
  const auto [lx, best] = boost::math::tools::brent_find_minima(var_at, -5.0, 0.0, 20);
  const double best_x = std::pow(10.0, lx);
  double at_limit = std::numeric_limits<double>::quiet_NaN();
  {
    SystemParams sl{1.0, 1e-6, KernelModel::markovian(1e-9)};
    const auto pt = linearize(sl, sl.omega_a + bn - 1e-6 * bn, n);
    at_limit = variance_adiabatic(pt).var_x;
  }

  const double big_bn = 1e3 * g;
  const double big = *exact_var_x(s, s.omega_a + g, big_bn / s.beta);
  Outcome o;
  o.pass = std::abs(best - 0.5) <= 0.01 && std::abs(big - 2.0 / 3.0) <= 0.02;
  o.detail = fmt("min var_x=%.4f at Delta/bn-1=%.1e (adiabatic limit %.4f)  large-n var_x=%.4f",
                 best, best_x, at_limit, big);
  return o;
}

Outcome criterion3() {
  const auto s = fig2();
  const std::vector<double> pumps{1.005, 1.012, 1.02, 1.03};
  double worst = 0.0;
  int used = 0;
  std::ostringstream d;
  for (double wp : pumps) {
    int here = 0;
    double wmax = 0.0;
    for (double n : logspace(1e6, 2e9, 120)) {
      const auto pt = linearize(s, wp, n);
      if (!(pt.Omega.real() > 0.0) || !is_stable(s, wp, n)) continue;
      NoiseResult ad;
      try {
        ad = variance_adiabatic(pt);
      } catch (const NumericalError&) {
        continue;
      }
      const double G = std::sqrt(ad.gamma2);
      if (!(pt.Omega.real() > 5.0 * G)) continue;
      // Stable throughout a box of +-5 Gamma in omega_p and in beta n; the
      // box is cut at zero photon number, which is not a boundary.
      bool clear = true;
      for (double dw : linspace(-5.0 * G, 5.0 * G, 9)) {
        for (double du : linspace(-5.0 * G, 5.0 * G, 9)) {
          const double nn = n + du / s.beta;
          if (nn > 0.0 && !is_stable(s, wp + dw, nn)) clear = false;
        }
      }
      if (!clear) continue;
      const auto ex = variance_exact(pt);
      const double rel = std::abs(ad.var_x - ex.var_x) / ex.var_x;
      wmax = std::max(wmax, rel);
      ++here;
    }
    worst = std::max(worst, wmax);
    used += here;
    d << fmt("wp=%.3f:%d pts max %.2f%%  ", wp, here, 100.0 * wmax);
  }
  Outcome o;
  o.pass = used >= 20 && worst < 0.05;
  o.detail = d.str() + fmt("| worst %.2f%% over %d points", 100.0 * worst, used);
  return o;
}

struct EdgeScan {
  double best = 1e9;
  double wp = 0.0;
  double n = 0.0;
};

EdgeScan scan_upper_edge(const SystemParams& s, const std::vector<double>& pumps) {
  std::vector<EdgeScan> per(pumps.size());
  parallel_for(pumps.size(), g_threads, [&](std::size_t i) {
    const double wp = pumps[i];
    const auto edge = upper_stable_edge(s, wp);
    if (!edge) return;
    for (double x : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0}) {
      const double n = *edge * (1.0 + x);
      if (!is_stable(s, wp, n)) continue;
      if (auto v = exact_var_x(s, wp, n); v && *v < per[i].best) per[i] = {*v, wp, n};
    }
  });
  EdgeScan best;
  for (const auto& e : per)
    if (e.best < best.best) best = e;
  return best;
}

Outcome criterion4() {
  const auto s = fig2();
  const double wd = 1.01, g = 1e-2;
  // Fig. 3 neighbourhood: half a linewidth to two linewidths above the bound state.
  const auto a = scan_upper_edge(s, linspace(wd + 0.5 * g, wd + 2.0 * g, 16));
  // Just to the right of the vanishing-loss point.
  const auto b = scan_upper_edge(s, linspace(wd + 1e-6, wd + 0.4 * g, 21));
  Outcome o;
  o.pass = a.best <= 0.15 && b.best <= 0.032;
  o.detail = fmt("fig3 band: min var_x=%.4f (%.1f dB) at wp=%.5f n=%.4g;  near bound state: "
                 "min var_x=%.4f (%.1f dB) at wp=%.5f n=%.4g",
                 a.best, -10 * std::log10(a.best), a.wp, a.n, b.best, -10 * std::log10(b.best),
                 b.wp, b.n);
  return o;
}

Outcome criterion5() {
  std::ostringstream d;
  bool fw_ok = false;
  {
    const auto s = fock_fw();
    const double wp = 1.0042;
    const auto edge = upper_stable_edge(s, wp);
    double best = 1e9, best_n = 0.0;
    if (edge) {
      for (double x : logspace(1e-6, 0.2, 60)) {
        const double n = *edge * (1.0 + x);
        if (!is_stable(s, wp, n)) continue;
        const auto v = exact_var_x(s, wp, n);
        if (v && std::abs(n - 42.0) <= 5.0 && *v <= 0.05) {
          fw_ok = true;
          best = *v;
          best_n = n;
          break;
        }
      }
    }
    d << fmt("fw: edge n=%.3f, F=%.4f at n=%.3f", edge.value_or(0.0), best, best_n);
  }

  bool fano_ok = false;
  {
    // The Fano feature here is narrower than the cavity linewidth, so the
    // adiabatic picture prescribed for comb kernels carries the classification
    // and the Fano factor; the exact integral is reported alongside.
    const auto s = fock_fano();
    double best = 1e9, best_n = 0.0, best_w = 0.0;
    for (double wp : linspace(1.0070, 1.0078, 33)) {
      for (double n = 60.0; n <= 80.0; n += 0.1) {
        const auto rep = classify(s, wp, n);
        if (rep.cls != Stability::Stable) continue;
        try {
          const auto ad = variance_adiabatic(linearize(s, wp, n));
          if (ad.var_x < best) {
            best = ad.var_x;
            best_n = n;
            best_w = wp;
          }
        } catch (const NumericalError&) {
        }
      }
    }
    fano_ok = best <= 0.05 && std::abs(best_n - 70.0) <= 10.0;
    std::string exact = "exact: ";
    if (best_n > 0.0) {
      const auto pt = linearize(s, best_w, best_n);
      const auto w = count_unstable_roots(pt);
      exact += w.unstable_roots > 0 ? fmt("%d growing roots", w.unstable_roots)
                                    : fmt("var_x=%.4f", *exact_var_x(s, best_w, best_n));
    }
    d << fmt("  fano(r_d=-0.999,sigma=+1): F=%.4f at n=%.2f wp=%.5f (%s)", best, best_n, best_w,
             exact.c_str());
  }
  Outcome o;
  o.pass = fw_ok && fano_ok;
  o.detail = d.str();
  return o;
}

Outcome criterion6() {
  const auto s = fig2();
  const std::size_t N = 200;
  const auto wgrid = linspace(0.995 + 1.3e-7, 1.035, N);
  const auto ngrid = logspace(1e6, 3e8, N);
  const auto pd = phase_diagram(s, wgrid, ngrid, g_threads);

  auto cls = [&](std::size_t i, std::size_t j) { return pd.at(i, j).cls; };
  std::vector<char> adi(N * N, 0);
  parallel_for(N, g_threads, [&](std::size_t j) {
    for (std::size_t i = 0; i < N; ++i) {
      const auto pt = linearize(s, wgrid[i], ngrid[j]);
      if (!(pt.Omega.real() > 0.0)) continue;
      try {
        adi[j * N + i] = adiabatic_mi_margin(s, wgrid[i], ngrid[j]) <= 0.0;
      } catch (const NumericalError&) {
      }
    }
  });

  // Wedge: saddle cells exist, with MI cells directly above and below it in some columns.
  std::size_t saddle = 0, mi_below = 0, mi_above = 0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      if (cls(i, j) != Stability::SaddleUnstable) continue;
      ++saddle;
      if (j > 0 && cls(i, j - 1) == Stability::MIUnstable) ++mi_below;
      if (j + 1 < N && cls(i, j + 1) == Stability::MIUnstable) ++mi_above;
    }
  }
  const bool wedge = saddle > 0 && mi_below > 0 && mi_above > 0;

  // Largest MI gain must sit in an MI region that touches the wedge.
  std::size_t bi = 0, bj = 0;
  double gmax = 0.0;
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t i = 0; i < N; ++i)
      if (pd.at(i, j).mi_gain > gmax) {
        gmax = pd.at(i, j).mi_gain;
        bi = i;
        bj = j;
      }
  bool adjacent = false;
  std::size_t hops = 0;
  {
    std::vector<char> seen(N * N, 0);
    std::vector<std::pair<std::size_t, std::size_t>> frontier{{bi, bj}};
    seen[bj * N + bi] = 1;
    while (!frontier.empty() && !adjacent) {
      std::vector<std::pair<std::size_t, std::size_t>> next;
      for (auto [i, j] : frontier) {
        const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const long ii = static_cast<long>(i) + di[k], jj = static_cast<long>(j) + dj[k];
          if (ii < 0 || jj < 0 || ii >= static_cast<long>(N) || jj >= static_cast<long>(N)) continue;
          const auto c = cls(ii, jj);
          if (c == Stability::SaddleUnstable) adjacent = true;
          if (c == Stability::MIUnstable && !seen[jj * N + ii]) {
            seen[jj * N + ii] = 1;
            next.emplace_back(ii, jj);
          }
        }
      }
      frontier.swap(next);
      if (!adjacent) ++hops;
    }
  }

  // Boundary agreement: every eigenvalue MI-boundary cell has an adiabatic
  // boundary within one cell.
  auto eig_mi = [&](std::size_t i, std::size_t j) { return cls(i, j) == Stability::MIUnstable; };
  std::size_t bcells = 0, matched = 0;
  for (std::size_t j = 0; j < N; ++j) {
    for (std::size_t i = 0; i < N; ++i) {
      bool edge = false;
      if (i + 1 < N && eig_mi(i, j) != eig_mi(i + 1, j)) edge = true;
      if (j + 1 < N && eig_mi(i, j) != eig_mi(i, j + 1)) edge = true;
      // Edges of the MI region against the saddle band belong to the saddle test.
      if (cls(i, j) == Stability::SaddleUnstable) edge = false;
      if (i + 1 < N && cls(i + 1, j) == Stability::SaddleUnstable) edge = false;
      if (j + 1 < N && cls(i, j + 1) == Stability::SaddleUnstable) edge = false;
      if (!edge) continue;
      ++bcells;
      bool found = false;
      for (std::size_t jj = j ? j - 1 : 0; jj <= std::min(N - 1, j + 2) && !found; ++jj)
        for (std::size_t ii = i ? i - 1 : 0; ii <= std::min(N - 1, i + 2) && !found; ++ii) {
          if (ii + 1 < N && ii + 1 <= i + 2 && adi[jj * N + ii] != adi[jj * N + ii + 1]) found = true;
          if (jj + 1 < N && jj + 1 <= j + 2 && adi[jj * N + ii] != adi[(jj + 1) * N + ii]) found = true;
        }
      matched += found;
    }
  }
  const double frac = bcells ? static_cast<double>(matched) / static_cast<double>(bcells) : 0.0;

  Outcome o;
  o.pass = wedge && adjacent && frac > 0.99;
  o.detail = fmt("saddle cells=%zu (MI below %zu, above %zu); max MI gain %.2e at wp=%.4f "
                 "n=%.3g, %zu cells from wedge; boundary agreement %zu/%zu = %.2f%%",
                 saddle, mi_below, mi_above, gmax, wgrid[bi], ngrid[bj], hops, matched, bcells,
                 100.0 * frac);
  return o;
}

struct RunDiag {
  PulsingDiagnostics dg;
  bool ok = false;
  std::string err;
};

RunDiag run_from_fixed_point(const SystemParams& s, double wp, double n, double t_end,
                             double kick, double window) {
  RunDiag r;
  try {
    const auto fp = two_mode_fixed_point(s, wp, n);
    SimOptions o;
    o.pump_phase = fp.pump_phase;
    o.expected_n = n;
    o.max_samples = 400000;
    const double rate = std::max({1e-2, std::abs(s.omega_a - wp), 3.0 * s.beta * n,
                                  std::abs(1.01 - wp)});
    const double dt = std::min(2.0, 0.04 / rate);
    const auto tr = simulate_two_mode(s, {wp, fp.flux}, t_end, dt,
                                      {fp.state.alpha * (1.0 + kick), fp.state.d}, o);
    r.dg = diagnose_pulsing(tr, window);
    r.ok = true;
  } catch (const std::exception& e) {
    r.err = e.what();
  }
  return r;
}

double pulse_frequency(const SystemParams& s, double wp, double n) {
  const auto rep = classify(s, wp, n);
  return rep.pulse_freq > 0.0 ? rep.pulse_freq : rep.im_lambda;
}

Outcome criterion7() {
  const auto s = fig2();
  std::ostringstream d;

  // Part 1: the self-pulsing operating point, n = 5e8. Take the pump with the
  // strongest MI gain at that photon number; without any, stay at the pump
  // used for the relaxation runs below.
  const double n = 5e8;
  double wp = 1.02, gbest = 0.0;
  int mi_cells = 0;
  for (double w : linspace(0.95, 1.30, 3501)) {
    const auto r = classify(s, w, n);
    if (r.cls != Stability::MIUnstable) continue;
    ++mi_cells;
    if (r.mi_gain > gbest) {
      gbest = r.mi_gain;
      wp = w;
    }
  }
  d << fmt("MI pumps at n=5e8 in [0.95,1.30]: %d;  ", mi_cells);
  const auto rep = classify(s, wp, n);
  bool pulse_ok = false;
  {
    const double fexp = pulse_frequency(s, wp, n);
    const auto r = run_from_fixed_point(s, wp, n, 4e6, 0.01, 0.3);
    if (r.ok) {
      pulse_ok = r.dg.is_pulsing && fexp > 0.0 &&
                 std::abs(r.dg.dominant_freq - fexp) <= 0.1 * fexp &&
                 std::abs(r.dg.swing_fraction - 0.8) <= 0.2;
      d << fmt("n=5e8 wp=%.3f class=%s: pulsing=%d f=%.3e (expected %.3e) swing=%.3f", wp,
               to_string(rep.cls).c_str(), r.dg.is_pulsing, r.dg.dominant_freq, fexp,
               r.dg.swing_fraction);
    } else {
      d << fmt("n=5e8 wp=%.3f class=%s: %s", wp, to_string(rep.cls).c_str(), r.err.c_str());
    }
  }

  // Part 2: relaxation slows down next to the MI band.
  bool ratio_ok = false;
  {
    const double wp = 1.02;
    double lo = 1e7, hi = 1e7;
    while (classify(s, wp, hi).cls != Stability::MIUnstable && hi < 1e9) hi *= 1.05;
    for (int i = 0; i < 60; ++i) {
      const double mid = std::sqrt(lo * hi);
      (classify(s, wp, mid).cls == Stability::MIUnstable ? hi : lo) = mid;
    }
    const double n_near = lo * 0.96, n_far = lo / 2.5;
    const auto near = run_from_fixed_point(s, wp, n_near, 4e6, 0.01, 0.5);
    const auto far = run_from_fixed_point(s, wp, n_far, 3e5, 0.01, 0.5);
    if (near.ok && far.ok && near.dg.decay_rate > 0.0) {
      const double ratio = far.dg.decay_rate / near.dg.decay_rate;
      ratio_ok = ratio >= 5.0;
      d << fmt(";  MI edge n=%.4g, decay near (n=%.3g) %.3e, far (n=%.3g) %.3e, ratio %.1f", lo,
               n_near, near.dg.decay_rate, n_far, far.dg.decay_rate, ratio);
    } else {
      d << ";  decay runs failed: " << near.err << " " << far.err;
    }
  }

  // Informational: the MI band that does exist for these parameters.
  {
    const double wp = 1.02, n_mi = 4.8e7;
    const auto r = run_from_fixed_point(s, wp, n_mi, 4e6, 0.01, 0.3);
    if (r.ok)
      d << fmt(";  [info] inside MI band n=%.2g: pulsing=%d f=%.3e (expected %.3e) swing=%.3f",
               n_mi, r.dg.is_pulsing, r.dg.dominant_freq, pulse_frequency(s, wp, n_mi),
               r.dg.swing_fraction);
  }
  Outcome o;
  o.pass = pulse_ok && ratio_ok;
  o.detail = d.str();
  return o;
}

Outcome criterion8() {
  const auto s = fig2();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> W(0.995, 1.03), L(6.0, 7.7);
  double worst = 0.0;
  int done = 0, tried = 0;
  while (done < 20 && tried < 500) {
    ++tried;
    const double wp = W(rng), n = std::pow(10.0, L(rng));
    if (std::abs(wp - 1.01) < 1e-3 || !is_stable(s, wp, n)) continue;
    const auto fp = two_mode_fixed_point(s, wp, n);
    SimOptions o;
    o.pump_phase = fp.pump_phase;
    o.expected_n = n;
    const cplx a0 = fp.state.alpha * 1.05;
    const double dt = 0.25, t_end = 2e4;
    const auto a = simulate_two_mode(s, {wp, fp.flux}, t_end, dt, {a0, 0.0}, o);
    const auto b = simulate_split_step(s, {wp, fp.flux}, t_end, dt, a0, o);
    double peak = 0.0, err = 0.0;
    for (std::size_t i = 0; i < std::min(a.n.size(), b.n.size()); ++i) {
      peak = std::max(peak, a.n[i]);
      err = std::max(err, std::abs(a.n[i] - b.n[i]));
    }
    worst = std::max(worst, err / peak);
    ++done;
  }
  Outcome o;
  o.pass = done == 20 && worst <= 1e-3;
  o.detail = fmt("%d configurations, worst max|dn|/max n = %.2e", done, worst);
  return o;
}

Outcome criterion9() {
  const auto s = fig2();
  const std::size_t NW = 48, NN = 48;
  const auto wgrid = linspace(0.995 + 1.3e-7, 1.035, NW);
  const auto ngrid = logspace(1e6, 3e8, NN);
  const auto pd = phase_diagram(s, wgrid, ngrid, g_threads);
  enum : char { kOk, kDiverge, kSaddle };
  std::vector<char> ex(NW * NN, kOk);
  parallel_for(NW * NN, g_threads, [&](std::size_t k) {
    const std::size_t i = k % NW, j = k / NW;
    try {
      variance_exact(linearize(s, wgrid[i], ngrid[j]));
    } catch (const NumericalError& e) {
      ex[k] = e.kind() == "unstable_point" ? kSaddle : kDiverge;
    }
  });
  auto near = [&](std::size_t i, std::size_t j, auto pred) {
    for (std::size_t jj = j ? j - 1 : 0; jj <= std::min(NN - 1, j + 1); ++jj)
      for (std::size_t ii = i ? i - 1 : 0; ii <= std::min(NW - 1, i + 1); ++ii)
        if (pred(ii, jj)) return true;
    return false;
  };
  std::size_t div = 0, mi = 0, mismatch = 0, strict = 0;
  for (std::size_t j = 0; j < NN; ++j) {
    for (std::size_t i = 0; i < NW; ++i) {
      const auto c = pd.at(i, j).cls;
      const char e = ex[j * NW + i];
      const bool is_mi = c == Stability::MIUnstable, is_div = e == kDiverge;
      div += is_div;
      mi += is_mi;
      const bool sad_c = c == Stability::SaddleUnstable, sad_e = e == kSaddle;
      if (is_mi == is_div && sad_c == sad_e) continue;
      ++strict;
      bool ok = true;
      if (is_div && !is_mi)
        ok &= near(i, j, [&](auto a, auto b) { return pd.at(a, b).cls == Stability::MIUnstable; });
      if (is_mi && !is_div)
        ok &= near(i, j, [&](auto a, auto b) { return ex[b * NW + a] == kDiverge; });
      if (sad_c != sad_e) ok = false;
      mismatch += !ok;
    }
  }
  Outcome o;
  o.pass = mismatch == 0 && mi > 0;
  o.detail = fmt("%zux%zu grid: diverging cells %zu, MI cells %zu, exact disagreements %zu, "
                 "beyond one grid step %zu",
                 NW, NN, div, mi, strict, mismatch);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  app.add_option("--threads", g_threads, "worker threads (0 = hardware)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> all{
      {"kernel consistency", criterion1},     {"flat-loss noise limits", criterion2},
      {"exact vs adiabatic noise", criterion3}, {"deep squeezing", criterion4},
      {"near-Fock states", criterion5},      {"phase-diagram structure", criterion6},
      {"self-pulsing dynamics", criterion7}, {"split-step oracle", criterion8},
      {"noise divergence vs MI", criterion9}};
  const double limits[] = {5, 10, 60, 300, 120, 180, 300, 300, 180};

  bool ok = true;
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (only && static_cast<int>(k + 1) != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = all[k].second();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = sec <= limits[k];
    const bool pass = r.pass && in_time;
    ok &= pass;
    std::printf("criterion %zu %-26s %s  [%.1f s / %.0f s]\n    %s\n", k + 1, all[k].first,
                pass ? "PASS" : "FAIL", sec, limits[k], r.detail.c_str());
    std::fflush(stdout);
  }
  return ok ? 0 : 1;
}
