#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <random>

#include "nmkerr/dynamics.hpp"
#include "nmkerr/errors.hpp"
#include "nmkerr/kernels.hpp"
#include "nmkerr/noise.hpp"
#include "nmkerr/parallel.hpp"
#include "nmkerr/stability.hpp"
#include "nmkerr/steadystate.hpp"
#include "svg.hpp"

namespace cli {

using nmk::cplx;
using nmk::Stability;
using nlohmann::json;

namespace {

std::vector<double> grid(double a, double b, std::size_t n, bool log) {
  if (n == 0) throw nmk::ConfigError("grid needs at least one point");
  if (log && (a <= 0.0 || b <= 0.0)) throw nmk::ConfigError("log grid bounds must be positive");
  if (!(b >= a)) throw nmk::ConfigError("grid upper bound below lower bound");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    v[i] = log ? a * std::pow(b / a, s) : a + (b - a) * s;
  }
  return v;
}

double class_code(Stability s) {
  switch (s) {
    case Stability::Stable: return 0;
    case Stability::SaddleUnstable: return 1;
    case Stability::MIUnstable: return 2;
    default: return 3;
  }
}

const std::vector<std::string> kClassPalette{"#ffffff", "#000000", "#9a9a9a", "#f4d03f"};
const std::vector<std::string> kClassLegend{"stable", "bistable (saddle)", "MI self-pulsing",
                                            "unknown"};

double fw_detuning_rate(const nmk::SystemParams& s, double wp) {
  if (s.kernel.is<nmk::FriedrichWintgen>())
    return std::abs(s.kernel.as<nmk::FriedrichWintgen>().omega_d - wp);
  return 0.0;
}

// Coupling rate that sets the scale of the Kramers-Kronig residual.
double radiative_rate(const nmk::KernelModel& k) {
  if (k.is<nmk::Markovian>()) return k.as<nmk::Markovian>().gamma;
  if (k.is<nmk::FriedrichWintgen>()) return k.as<nmk::FriedrichWintgen>().kappa;
  return k.as<nmk::FanoMirror>().kappa;
}

nmk::KernelModel without_background(const nmk::KernelModel& k) {
  if (k.is<nmk::Markovian>()) return nmk::KernelModel::markovian(k.as<nmk::Markovian>().gamma);
  if (k.is<nmk::FriedrichWintgen>()) {
    const auto& f = k.as<nmk::FriedrichWintgen>();
    return nmk::KernelModel::friedrich_wintgen(f.kappa, f.gamma, f.omega_d);
  }
  const auto& f = k.as<nmk::FanoMirror>();
  return nmk::KernelModel::fano_mirror(f.kappa, f.r_d, f.t_d, f.sigma, f.round_trip, f.theta1,
                                       f.theta2);
}

struct SimSetup {
  nmk::Drive drive;
  nmk::SimOptions opts;
  nmk::TwoModeInitial init;
  bool two_mode = true;
  double t_end = 0.0, dt = 0.0;
};

SimSetup prepare(Context& ctx, const TransientArgs& a) {
  const auto& s = ctx.system();
  SimSetup st;
  const double wp = ctx.f_in(a.omega_p);
  const bool fw = s.kernel.is<nmk::FriedrichWintgen>();
  if (a.method == "auto") st.two_mode = fw;
  else if (a.method == "two-mode") st.two_mode = true;
  else if (a.method == "split-step") st.two_mode = false;
  else throw nmk::ConfigError("unknown method '" + a.method + "' (auto, two-mode, split-step)");
  if (st.two_mode && !fw) throw nmk::ConfigError("two-mode integration needs the fw model");
  if (a.kick < 0.0) throw nmk::ConfigError("--kick must be nonnegative");

  std::mt19937_64 rng(ctx.seed);
  std::normal_distribution<double> N(0.0, 1.0);
  cplx z(N(rng), N(rng));
  z /= std::abs(z);
  const cplx nudge = 1.0 + a.kick * z;

  double n_est = 0.0;
  if (a.n) {
    if (*a.n <= 0.0) throw nmk::ConfigError("--n must be positive");
    n_est = *a.n;
    if (st.two_mode) {
      const auto fp = nmk::two_mode_fixed_point(s, wp, *a.n);
      st.drive = {wp, fp.flux};
      st.opts.pump_phase = fp.pump_phase;
      st.init = {fp.state.alpha * nudge, fp.state.d};
    } else {
      const auto ss = nmk::steady_state_at(s, wp, *a.n);
      st.drive = {wp, nmk::pump_for_n(s, wp, *a.n)};
      st.opts.pump_phase = ss.pump_phase;
      st.init = {ss.alpha0 * nudge, 0.0};
    }
    st.opts.expected_n = *a.n;
  } else if (a.flux) {
    if (*a.flux < 0.0) throw nmk::ConfigError("--flux must be nonnegative");
    st.drive = {wp, ctx.f_in(*a.flux)};
    st.init = {0.0, 0.0};
    const auto roots = nmk::steady_roots(s, st.drive);
    n_est = roots.empty() ? 0.0 : roots.back().n;
  } else {
    throw nmk::ConfigError("give either --n or --flux");
  }
  st.opts.max_samples = a.samples;

  const double rate = std::max({s.kernel.rate_scale(), std::abs(s.omega_a - wp),
                                3.0 * s.beta * n_est, fw_detuning_rate(s, wp)});
  st.dt = a.dt ? ctx.t_in(*a.dt) : std::min(2.0, 0.04 / rate);
  double t_end = 40.0 / s.kernel.mean_loss();
  if (!st.two_mode) t_end = std::max(t_end, 10.5 * s.kernel.memory_time());
  st.t_end = a.t_end ? ctx.t_in(*a.t_end) : t_end;
  return st;
}

nmk::Trajectory run(const Context& ctx, const SimSetup& st) {
  const auto& s = ctx.system();
  return st.two_mode ? nmk::simulate_two_mode(s, st.drive, st.t_end, st.dt, st.init, st.opts)
                     : nmk::simulate_split_step(s, st.drive, st.t_end, st.dt, st.init.alpha,
                                                st.opts);
}

void write_trajectory(Context& ctx, const nmk::Trajectory& tr, const std::string& stem) {
  Csv csv(ctx.file(stem + ".csv"), {{"t", ctx.t_unit()},
                                    {"re_alpha", "sqrt(photons)"},
                                    {"im_alpha", "sqrt(photons)"},
                                    {"n", "photons"}});
  for (std::size_t i = 0; i < tr.t.size(); ++i)
    csv.row({num(ctx.t_out(tr.t[i])), num(tr.alpha[i].real()), num(tr.alpha[i].imag()),
             num(tr.n[i])});
  if (ctx.plot) {
    LinePlot p{"photon number", "t [" + ctx.t_unit() + "]", "n", false, false, {}};
    Series sr{tr.method, {}, tr.n};
    for (double t : tr.t) sr.x.push_back(ctx.t_out(t));
    p.series.push_back(std::move(sr));
    write_svg(ctx.file(stem + ".svg"), p);
  }
}

}  // namespace

void kernel_scan(Context& ctx, const KernelScanArgs& a) {
  const auto& s = ctx.system();
  const double lo = a.from ? ctx.f_in(*a.from) : s.omega_a - 0.1;
  const double hi = a.to ? ctx.f_in(*a.to) : s.omega_a + 0.1;
  const auto w = grid(lo, hi, a.points, false);
  const auto samples = nmk::scan_kernel(s.kernel, w);
  const std::string fu = ctx.f_unit(), su = "sqrt(" + ctx.f_unit() + ")";
  Csv csv(ctx.file(a.stem + ".csv"),
          {{"omega", fu}, {"re_Kl", fu}, {"im_Kl", fu}, {"re_Kc", su}, {"im_Kc", su}});
  const double sq = std::sqrt(ctx.wa());
  for (const auto& k : samples)
    csv.row({num(ctx.f_out(k.omega)), num(ctx.f_out(k.loss.real())),
             num(ctx.f_out(k.loss.imag())), num(k.coupling.real() * sq),
             num(k.coupling.imag() * sq)});
  if (ctx.plot) {
    LinePlot p{"loss kernel", "omega [" + fu + "]", "K_l [" + fu + "]", false, false, {}};
    Series re{"Re K_l", {}, {}}, im{"Im K_l", {}, {}, true};
    for (const auto& k : samples) {
      re.x.push_back(ctx.f_out(k.omega));
      im.x.push_back(ctx.f_out(k.omega));
      re.y.push_back(ctx.f_out(k.loss.real()));
      im.y.push_back(ctx.f_out(k.loss.imag()));
    }
    p.series = {re, im};
    write_svg(ctx.file(a.stem + ".svg"), p);
  }
}

namespace {

// Fluxes bounding the bistable range, from the turning points of flux(n).
std::vector<double> turning_fluxes(const nmk::SystemParams& s, double wp) {
  if (s.beta <= 0.0) return {};
  const cplx kl = s.kernel.loss(wp);
  const double D = wp - s.omega_a - kl.imag(), L = kl.real();
  const double disc = D * D - 3.0 * L * L;
  if (D <= 0.0 || disc <= 0.0) return {};
  const double n_lo = (2.0 * D - std::sqrt(disc)) / (3.0 * s.beta);
  const double n_hi = (2.0 * D + std::sqrt(disc)) / (3.0 * s.beta);
  std::vector<double> f{nmk::pump_for_n(s, wp, n_hi), nmk::pump_for_n(s, wp, n_lo)};
  std::sort(f.begin(), f.end());
  return f;
}

}  // namespace

void sweep(Context& ctx, const SweepArgs& a) {
  const auto& s = ctx.system();
  const double wp = ctx.f_in(a.omega_p);
  const auto turns = turning_fluxes(s, wp);
  double fmax = 0.0;
  if (a.flux_max) {
    fmax = ctx.f_in(*a.flux_max);
  } else if (!turns.empty()) {
    fmax = 3.0 * turns.back();
  } else {
    const cplx kl = s.kernel.loss(wp);
    const double D = std::abs(wp - s.omega_a - kl.imag()), L = kl.real();
    const double n_top = s.beta > 0.0 ? 3.0 * (D + L) / s.beta : 1.0;
    fmax = nmk::pump_for_n(s, wp, n_top);
  }
  if (!(fmax > 0.0)) throw nmk::ConfigError("--flux-max must be positive");
  double fmin = fmax * 1e-4;
  if (!turns.empty()) fmin = std::min(fmin, 0.01 * turns.front());
  const auto flux =
      a.log ? grid(fmin, fmax, a.points, true) : grid(fmax / a.points, fmax, a.points, false);
  const auto sw = nmk::sweep_input_output(s, wp, flux, ctx.threads);

  Csv csv(ctx.file(a.stem + ".csv"), {{"flux", ctx.flux_unit()},
                                      {"n_root1", "photons"},
                                      {"n_root2", "photons"},
                                      {"n_root3", "photons"},
                                      {"branch_id", "-"}});
  std::vector<Series> roots(3);
  for (int k = 0; k < 3; ++k) roots[k].label = "root " + std::to_string(k + 1);
  for (const auto& p : sw.points) {
    // 0 below the bistable range, 1 inside it, 2 above it; 0 throughout when
    // the pump cannot produce bistability.
    const auto branch = std::upper_bound(turns.begin(), turns.end(), p.flux) - turns.begin();
    std::vector<std::string> row{num(ctx.f_out(p.flux))};
    for (std::size_t k = 0; k < 3; ++k) {
      const double n = k < p.roots.size() ? p.roots[k].n : NAN;
      row.push_back(num(n));
      roots[k].x.push_back(ctx.f_out(p.flux));
      roots[k].y.push_back(n);
    }
    row.push_back(std::to_string(branch));
    csv.row(row);
  }
  if (ctx.plot) {
    LinePlot p{"input-output", "flux [" + ctx.flux_unit() + "]", "n", a.log, true, roots};
    write_svg(ctx.file(a.stem + ".svg"), p);
  }
}

void noise(Context& ctx, const NoiseArgs& a) {
  const auto& s = ctx.system();
  const double wp = ctx.f_in(a.omega_p);
  struct Row {
    double n, vx = NAN, vy = NAN, vxa = NAN;
    Stability cls = Stability::Unknown;
  };
  std::vector<Row> rows;
  if (a.n) {
    const auto pt = nmk::linearize(s, wp, *a.n);
    Row r{*a.n};
    r.cls = nmk::classify(s, wp, *a.n).cls;
    const auto ex = nmk::variance_exact(pt);
    r.vx = ex.var_x;
    r.vy = ex.var_y;
    try {
      r.vxa = nmk::variance_adiabatic(pt).var_x;
    } catch (const nmk::NumericalError&) {
    }
    rows.push_back(r);
  } else {
    for (double n : grid(a.n_min, a.n_max, a.points, !a.linear)) rows.push_back({n});
    nmk::parallel_for(rows.size(), ctx.threads, [&](std::size_t i) {
      Row& r = rows[i];
      r.cls = nmk::classify(s, wp, r.n).cls;
      const auto pt = nmk::linearize(s, wp, r.n);
      try {
        r.vxa = nmk::variance_adiabatic(pt).var_x;
      } catch (const nmk::NumericalError&) {
      }
      if (!a.exact) return;
      try {
        const auto ex = nmk::variance_exact(pt);
        r.vx = ex.var_x;
        r.vy = ex.var_y;
      } catch (const nmk::NumericalError&) {
      }
    });
  }
  Csv csv(ctx.file(a.stem + ".csv"), {{"n", "photons"},
                                      {"var_x_exact", "shot noise"},
                                      {"var_y_exact", "shot noise"},
                                      {"var_x_adiabatic", "shot noise"},
                                      {"fano", "-"},
                                      {"class", "-"}});
  for (const auto& r : rows)
    csv.row({num(r.n), num(r.vx), num(r.vy), num(r.vxa), num(a.exact ? r.vx : r.vxa),
             nmk::to_string(r.cls)});
  if (ctx.plot) {
    LinePlot p{"quadrature noise", "n", "variance / shot noise", !a.linear, true, {}};
    Series x{"X exact", {}, {}}, y{"Y exact", {}, {}}, xa{"X adiabatic", {}, {}, true};
    for (const auto& r : rows) {
      x.x.push_back(r.n), y.x.push_back(r.n), xa.x.push_back(r.n);
      x.y.push_back(r.vx), y.y.push_back(r.vy), xa.y.push_back(r.vxa);
    }
    if (a.exact) p.series = {x, y, xa};
    else p.series = {xa};
    write_svg(ctx.file(a.stem + ".svg"), p);
  }
}

void noise_spectrum(Context& ctx, const SpectrumArgs& a) {
  const auto& s = ctx.system();
  const double wp = ctx.f_in(a.omega_p);
  const auto pt = nmk::linearize(s, wp, a.n);
  if (pt.Omega.real() == 0.0 && pt.Omega.imag() != 0.0)
    throw nmk::NumericalError("unstable_point", "steady state lies in the saddle band");
  const auto wind = nmk::count_unstable_roots(pt);
  if (wind.unstable_roots > 0 || wind.singular)
    throw nmk::NumericalError("diverges", "fluctuations grow at this point; no stationary spectrum");
  const double wmax = a.omega_max ? ctx.f_in(*a.omega_max)
                                  : 5.0 * std::abs(pt.Omega) + 20.0 * s.kernel.mean_loss();
  const auto w = grid(-wmax, wmax, a.points, false);
  const auto sp = nmk::noise_spectrum(pt, w);
  const std::string su = "1/(" + ctx.f_unit() + ")";
  Csv csv(ctx.file(a.stem + ".csv"), {{"omega", ctx.f_unit()}, {"Sx", su}, {"Sy", su}});
  for (const auto& v : sp)
    csv.row({num(ctx.f_out(v.omega)), num(v.sx / ctx.wa()), num(v.sy / ctx.wa())});
  if (ctx.plot) {
    LinePlot p{"noise spectrum", "sideband omega [" + ctx.f_unit() + "]", "S [" + su + "]", false,
               true, {}};
    Series x{"Sx", {}, {}}, y{"Sy", {}, {}, true};
    for (const auto& v : sp) {
      x.x.push_back(ctx.f_out(v.omega)), y.x.push_back(ctx.f_out(v.omega));
      x.y.push_back(v.sx / ctx.wa()), y.y.push_back(v.sy / ctx.wa());
    }
    p.series = {x, y};
    write_svg(ctx.file(a.stem + ".svg"), p);
  }
}

void phase_diagram(Context& ctx, const PhaseArgs& a) {
  const auto& s = ctx.system();
  const auto w = grid(ctx.f_in(a.w_min), ctx.f_in(a.w_max), a.nw, false);
  const auto n = grid(a.n_min, a.n_max, a.nn, !a.linear_n);
  const auto pd = nmk::phase_diagram(s, w, n, ctx.threads);
  const std::string fu = ctx.f_unit();
  Csv csv(ctx.file(a.stem + ".csv"), {{"omega_p", fu},
                                      {"n", "photons"},
                                      {"class", "-"},
                                      {"mi_gain", fu},
                                      {"re_lambda_max", fu},
                                      {"im_lambda", fu}});
  Heatmap h{"phase diagram", "omega_p [" + fu + "]", "n", {}, n, {}, !a.linear_n, kClassPalette,
            kClassLegend};
  for (double v : w) h.x.push_back(ctx.f_out(v));
  for (std::size_t j = 0; j < n.size(); ++j)
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto& c = pd.at(i, j);
      csv.row({num(ctx.f_out(c.omega_p)), num(c.n), nmk::to_string(c.cls),
               num(ctx.f_out(c.mi_gain)), num(ctx.f_out(c.re_lambda_max)),
               num(ctx.f_out(c.im_lambda))});
      h.values.push_back(class_code(c.cls));
    }
  if (ctx.plot) write_svg(ctx.file(a.stem + ".svg"), h);
}

void noise_map(Context& ctx, const PhaseArgs& a) {
  const auto& s = ctx.system();
  const auto w = grid(ctx.f_in(a.w_min), ctx.f_in(a.w_max), a.nw, false);
  const auto n = grid(a.n_min, a.n_max, a.nn, !a.linear_n);
  const auto pd = nmk::phase_diagram(s, w, n, ctx.threads);
  std::vector<double> var(w.size() * n.size(), NAN);
  nmk::parallel_for(var.size(), ctx.threads, [&](std::size_t k) {
    const std::size_t i = k % w.size(), j = k / w.size();
    if (pd.at(i, j).cls != Stability::Stable) return;
    try {
      var[k] = nmk::variance_adiabatic(nmk::linearize(s, w[i], n[j])).var_x;
    } catch (const nmk::NumericalError&) {
    }
  });
  Csv csv(ctx.file(a.stem + ".csv"), {{"omega_p", ctx.f_unit()},
                                      {"n", "photons"},
                                      {"class", "-"},
                                      {"var_x_adiabatic", "shot noise"}});
  Heatmap h{"amplitude noise (log10)", "omega_p [" + ctx.f_unit() + "]", "n", {}, n, {},
            !a.linear_n, {}, {}};
  for (double v : w) h.x.push_back(ctx.f_out(v));
  for (std::size_t j = 0; j < n.size(); ++j)
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double v = var[j * w.size() + i];
      csv.row({num(ctx.f_out(w[i])), num(n[j]), nmk::to_string(pd.at(i, j).cls), num(v)});
      h.values.push_back(std::isfinite(v) ? std::log10(v) : NAN);
    }
  if (ctx.plot) write_svg(ctx.file(a.stem + ".svg"), h);
}

void eigenvalue_scan(Context& ctx, double omega_p, double n_min, double n_max, std::size_t points,
                     const std::string& stem) {
  const auto& s = ctx.system();
  if (!s.kernel.is<nmk::FriedrichWintgen>())
    throw nmk::ConfigError("eigenvalue scan needs the fw model");
  const double wp = ctx.f_in(omega_p);
  const auto n = grid(n_min, n_max, points, true);
  const std::string fu = ctx.f_unit();
  std::vector<Column> cols{{"n", "photons"}};
  for (int k = 1; k <= 4; ++k) {
    cols.push_back({"re_lambda" + std::to_string(k), fu});
    cols.push_back({"im_lambda" + std::to_string(k), fu});
  }
  Csv csv(ctx.file(stem + ".csv"), cols);
  std::vector<Series> re(4);
  for (int k = 0; k < 4; ++k) re[k].label = "Re lambda" + std::to_string(k + 1);
  for (double v : n) {
    auto ev = nmk::classify(s, wp, v).eigenvalues;
    std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) {
      return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
    });
    std::vector<std::string> row{num(v)};
    for (std::size_t k = 0; k < 4; ++k) {
      const cplx e = k < ev.size() ? ev[k] : cplx(NAN, NAN);
      row.push_back(num(ctx.f_out(e.real())));
      row.push_back(num(ctx.f_out(e.imag())));
      re[k].x.push_back(v);
      re[k].y.push_back(ctx.f_out(e.real()));
    }
    csv.row(row);
  }
  if (ctx.plot) {
    LinePlot p{"stability eigenvalues", "n", "Re lambda [" + fu + "]", true, false, re};
    write_svg(ctx.file(stem + ".svg"), p);
  }
}

void transient(Context& ctx, const TransientArgs& a) {
  const auto st = prepare(ctx, a);
  write_trajectory(ctx, run(ctx, st), a.stem);
}

void diagnose(Context& ctx, const TransientArgs& a) {
  const auto& s = ctx.system();
  const auto st = prepare(ctx, a);
  const auto tr = run(ctx, st);
  write_trajectory(ctx, tr, a.stem);

  const double wp = st.drive.omega_p;
  std::optional<nmk::StabilityReport> rep;
  if (a.n) rep = nmk::classify(s, wp, *a.n);
  const double expected = rep && rep->cls == Stability::MIUnstable ? rep->pulse_freq : NAN;
  const auto dg = nmk::diagnose_pulsing(
      tr, a.window, std::isfinite(expected) ? std::optional<double>(expected) : std::nullopt);

  Csv csv(ctx.file("diagnose.csv"), {{"omega_p", ctx.f_unit()},
                                     {"n", "photons"},
                                     {"class", "-"},
                                     {"is_pulsing", "-"},
                                     {"dominant_freq", ctx.f_unit()},
                                     {"expected_pulse_freq", ctx.f_unit()},
                                     {"swing_fraction", "-"},
                                     {"mean_n", "photons"},
                                     {"decay_rate", ctx.f_unit()}});
  const std::string cls = rep ? nmk::to_string(rep->cls) : "unknown";
  csv.row({num(ctx.f_out(wp)), num(a.n.value_or(NAN)), cls, dg.is_pulsing ? "1" : "0",
           num(ctx.f_out(dg.dominant_freq)), num(ctx.f_out(expected)), num(dg.swing_fraction),
           num(dg.mean_n), num(ctx.f_out(dg.decay_rate))});
  json out{{"class", cls},
           {"is_pulsing", dg.is_pulsing},
           {"dominant_freq", ctx.f_out(dg.dominant_freq)},
           {"swing_fraction", dg.swing_fraction},
           {"mean_n", dg.mean_n},
           {"decay_rate", ctx.f_out(dg.decay_rate)}};
  if (std::isfinite(expected)) out["expected_pulse_freq"] = ctx.f_out(expected);
  std::cout << out.dump() << '\n';
}

bool validate(Context& ctx) {
  const auto& s = ctx.system();
  struct Check {
    std::string name;
    double value, threshold;
    bool pass;
  };
  std::vector<Check> checks;

  const auto bare = without_background(s.kernel);
  const auto w = grid(s.omega_a - 0.2, s.omega_a + 0.2, 10000, false);
  const double kk = nmk::kk_residual(bare, w);
  const double kk_tol = 1e-10 * radiative_rate(bare);
  checks.push_back({"kk_residual", kk, kk_tol, kk <= kk_tol});

  const auto sr = nmk::sum_rule_check({s.omega_a, 0.0, s.kernel});
  checks.push_back({"sum_rule", std::abs(sr.value - 1.0), 1e-3, std::abs(sr.value - 1.0) <= 1e-3});

  nmk::TimeKernelOptions tko;
  tko.center = s.omega_a;
  double dt = std::min(0.5, 0.1 / s.kernel.rate_scale());
  if (auto P = s.kernel.period()) dt = 2.0 * M_PI / *P / 64.0;
  const auto tk = nmk::time_kernel(s.kernel, dt, 8192, tko);
  checks.push_back({"causality", tk.causality_violation, 1e-6, tk.causality_violation < 1e-6});

  if (s.kernel.is<nmk::FriedrichWintgen>()) {
    const auto& f = s.kernel.as<nmk::FriedrichWintgen>();
    const double expect = -2.0 * (f.kappa + s.kernel.background()) - 2.0 * f.gamma;
    double worst = 0.0;
    for (double u : {0.0, 1e-3, 1e-2}) {
      const double n = s.beta > 0.0 ? u / s.beta : 1.0;
      const double tr = nmk::fw_matrix(s, s.omega_a, n).trace();
      worst = std::max(worst, std::abs(tr - expect) / std::abs(expect));
    }
    checks.push_back({"trace_identity", worst, 1e-12, worst <= 1e-12});
  }

  Csv csv(ctx.file("validate.csv"),
          {{"check", "-"}, {"value", "-"}, {"threshold", "-"}, {"pass", "-"}});
  bool ok = true;
  for (const auto& c : checks) {
    csv.row({c.name, num(c.value), num(c.threshold), c.pass ? "1" : "0"});
    std::printf("%-16s %-4s value=%.3e threshold=%.1e\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                c.value, c.threshold);
    ok &= c.pass;
  }
  return ok;
}

}  // namespace cli
