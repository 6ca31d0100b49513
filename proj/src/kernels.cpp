#include "nmkerr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "nmkerr/errors.hpp"
#include "quadrature.hpp"

namespace nmk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

KernelModel KernelModel::markovian(double gamma) {
  KernelModel m(Markovian{gamma});
  m.validate();
  return m;
}

KernelModel KernelModel::friedrich_wintgen(double kappa, double gamma, double omega_d) {
  KernelModel m(FriedrichWintgen{kappa, gamma, omega_d});
  m.validate();
  return m;
}

KernelModel KernelModel::fano_mirror(double kappa, double r_d, double t_d, int sigma,
                                     double round_trip, std::optional<double> theta1,
                                     std::optional<double> theta2) {
  if (sigma != 1 && sigma != -1) throw ConfigError("fano: sigma must be +1 or -1");
  if (!std::isfinite(r_d) || !std::isfinite(t_d))
    throw ConfigError("fano: r_d and t_d must be finite");
  const double norm2 = r_d * r_d + t_d * t_d;
  if (norm2 > 1.0 + 1e-12)
    throw ConfigError("fano: r_d^2 + t_d^2 must not exceed 1");
  // e^{2 i theta2} = r_d - i t_d sigma is a unit phasor only for a lossless mirror.
  if (std::abs(norm2 - 1.0) > 1e-9)
    throw ConfigError("fano: e^{2i theta2} = r_d - i t_d sigma requires r_d^2 + t_d^2 = 1");
  const double s = 1.0 / std::sqrt(norm2);
  FanoMirror f{kappa, r_d * s, t_d * s, sigma, round_trip, 0.0, 0.0};
  const double th2_canon = 0.5 * std::arg(cplx(f.r_d, -f.t_d * sigma));
  if (theta2) {
    const cplx lhs = std::exp(2.0 * I * *theta2);
    if (std::abs(lhs - cplx(f.r_d, -f.t_d * sigma)) > 1e-12)
      throw ConfigError("fano: theta2 inconsistent with e^{2i theta2} = r_d - i t_d sigma");
    f.theta2 = *theta2;
  } else {
    f.theta2 = th2_canon;
  }
  f.theta1 = theta1 ? *theta1 : (sigma == 1 ? f.theta2 : f.theta2 - kPi);
  KernelModel m(f);
  m.validate();
  return m;
}

KernelModel KernelModel::with_background(double kappa_bg) const {
  if (!finite_nonneg(kappa_bg)) throw ConfigError("background loss must be >= 0");
  KernelModel m = *this;
  m.kappa_bg_ += kappa_bg;
  return m;
}

void KernelModel::validate() const {
  std::visit(overloaded{
                 [](const Markovian& m) {
                   if (!finite_nonneg(m.gamma)) throw ConfigError("markov: gamma must be >= 0");
                 },
                 [](const FriedrichWintgen& m) {
                   if (!finite_nonneg(m.kappa) || !finite_nonneg(m.gamma))
                     throw ConfigError("fw: kappa and gamma must be >= 0");
                   if (!(m.gamma > 0.0)) throw ConfigError("fw: gamma must be > 0");
                   if (!std::isfinite(m.omega_d)) throw ConfigError("fw: omega_d must be finite");
                 },
                 [](const FanoMirror& m) {
                   if (!finite_nonneg(m.kappa)) throw ConfigError("fano: kappa must be >= 0");
                   if (!(m.round_trip > 0.0) || !std::isfinite(m.round_trip))
                     throw ConfigError("fano: round-trip time T must be > 0");
                   if (!std::isfinite(m.theta1) || !std::isfinite(m.theta2))
                     throw ConfigError("fano: phases must be finite");
                 },
             },
             core_);
}

cplx KernelModel::loss(double omega) const {
  const cplx k = std::visit(
      overloaded{
          [](const Markovian& m) { return cplx(m.gamma, 0.0); },
          [omega](const FriedrichWintgen& m) {
            const double d = m.omega_d - omega;
            // kappa * iD / (iD + gamma), written with explicit real/imag parts so
            // the loss zero at omega_d is exact.
            const double den = d * d + m.gamma * m.gamma;
            if (den == 0.0) return cplx(0.0, 0.0);
            return cplx(m.kappa * d * d / den, m.kappa * d * m.gamma / den);
          },
          [omega](const FanoMirror& m) {
            const cplx z = std::exp(-I * (omega * m.round_trip));
            const cplx e2 = std::exp(2.0 * I * m.theta2);
            return 2.0 * m.kappa * (1.0 - e2 / (m.r_d - z));
          },
      },
      core_);
  return k + kappa_bg_;
}

cplx KernelModel::coupling(double omega) const {
  return std::visit(
      overloaded{
          [](const Markovian& m) { return cplx(std::sqrt(2.0 * m.gamma), 0.0); },
          [omega](const FriedrichWintgen& m) {
            const double d = m.omega_d - omega;
            const double den = d * d + m.gamma * m.gamma;
            if (den == 0.0) return cplx(0.0, 0.0);
            return std::sqrt(2.0 * m.kappa) * cplx(d * d / den, d * m.gamma / den);
          },
          [omega](const FanoMirror& m) {
            const cplx z = std::exp(-I * (omega * m.round_trip));
            const cplx rel = std::exp(I * (m.theta2 - m.theta1));
            return std::sqrt(2.0 * m.kappa) * std::exp(I * m.theta1) *
                   (1.0 + I * m.t_d * rel / (m.r_d - z));
          },
      },
      core_);
}

std::string KernelModel::name() const {
  return std::visit(overloaded{
                        [](const Markovian&) { return std::string("markov"); },
                        [](const FriedrichWintgen&) { return std::string("fw"); },
                        [](const FanoMirror&) { return std::string("fano"); },
                    },
                    core_);
}

double KernelModel::instantaneous_loss() const {
  return kappa_bg_ + std::visit(overloaded{
                                    [](const Markovian& m) { return m.gamma; },
                                    [](const FriedrichWintgen& m) { return m.kappa; },
                                    [](const FanoMirror& m) { return 2.0 * m.kappa; },
                                },
                                core_);
}

cplx KernelModel::instantaneous_coupling() const {
  return std::visit(
      overloaded{
          [](const Markovian& m) { return cplx(std::sqrt(2.0 * m.gamma), 0.0); },
          [](const FriedrichWintgen& m) { return cplx(std::sqrt(2.0 * m.kappa), 0.0); },
          [](const FanoMirror& m) { return std::sqrt(2.0 * m.kappa) * std::exp(I * m.theta1); },
      },
      core_);
}

double KernelModel::mean_loss() const { return instantaneous_loss(); }

double KernelModel::feature_scale() const {
  return std::visit(overloaded{
                        [](const Markovian&) { return std::numeric_limits<double>::infinity(); },
                        [](const FriedrichWintgen& m) { return m.gamma; },
                        [](const FanoMirror& m) {
                          const double w = std::min(1.0 - std::abs(m.r_d), std::abs(m.t_d));
                          return std::max(w, 1e-12) / m.round_trip;
                        },
                    },
                    core_);
}

std::vector<double> KernelModel::feature_frequencies(double lo, double hi) const {
  std::vector<double> out;
  std::visit(overloaded{
                 [](const Markovian&) {},
                 [&](const FriedrichWintgen& m) {
                   if (m.omega_d >= lo && m.omega_d <= hi) out.push_back(m.omega_d);
                 },
                 [&](const FanoMirror& m) {
                   const double T = m.round_trip;
                   const double P = 2.0 * kPi / T;
                   // Loss zeros at e^{-i omega T} = r_d + i sigma t_d, loss maxima
                   // where e^{-i omega T} is closest to r_d.
                   const double zero = -std::arg(cplx(m.r_d, m.sigma * m.t_d)) / T;
                   const double peak = m.r_d >= 0.0 ? 0.0 : kPi / T;
                   for (double base : {zero, peak}) {
                     const double k0 = std::ceil((lo - base) / P);
                     for (double k = k0; base + k * P <= hi; k += 1.0) out.push_back(base + k * P);
                   }
                   std::sort(out.begin(), out.end());
                 },
             },
             core_);
  return out;
}

std::optional<double> KernelModel::period() const {
  if (const auto* f = std::get_if<FanoMirror>(&core_)) return 2.0 * kPi / f->round_trip;
  return std::nullopt;
}

double KernelModel::memory_time() const {
  const double ln_thr = std::log(1e-8);
  return std::visit(overloaded{
                        [](const Markovian&) { return 0.0; },
                        [&](const FriedrichWintgen& m) { return -ln_thr / m.gamma; },
                        [&](const FanoMirror& m) {
                          const double r = std::abs(m.r_d);
                          if (r == 0.0) return m.round_trip;
                          if (r >= 1.0) return std::numeric_limits<double>::infinity();
                          return m.round_trip * (1.0 + ln_thr / std::log(r));
                        },
                    },
                    core_);
}

double KernelModel::rate_scale() const {
  const double core = std::visit(overloaded{
                                     [](const Markovian& m) { return m.gamma; },
                                     [](const FriedrichWintgen& m) {
                                       return std::max(m.kappa, m.gamma);
                                     },
                                     [](const FanoMirror& m) { return 2.0 * m.kappa; },
                                 },
                                 core_);
  return std::max(core, kappa_bg_);
}

void SystemParams::validate() const {
  if (!(omega_a > 0.0) || !std::isfinite(omega_a)) throw ConfigError("omega_a must be > 0");
  if (!finite_nonneg(beta)) throw ConfigError("beta must be >= 0");
}

std::vector<ComplexKernelSample> scan_kernel(const KernelModel& model,
                                             std::span<const double> omegas) {
  std::vector<ComplexKernelSample> out;
  out.reserve(omegas.size());
  for (double w : omegas) out.push_back({w, model.loss(w), model.coupling(w)});
  return out;
}

double kk_residual(const KernelModel& model, std::span<const double> omegas) {
  if (model.has_background())
    throw ConfigError(
        "kk_residual: background loss breaks |K_c|^2 = 2 Re K_l by 2*kappa_bg; "
        "check the model without background");
  if (omegas.empty()) throw ConfigError("kk_residual: empty frequency grid");
  double worst = 0.0;
  for (double w : omegas) {
    const double r = std::abs(2.0 * model.loss(w).real() - std::norm(model.coupling(w)));
    worst = std::max(worst, r);
  }
  return worst;
}

cplx response_xi(const SystemParams& system, double omega) {
  return I / (I * (system.omega_a - omega) + system.kernel.loss(omega));
}

SumRuleResult sum_rule_check(const SystemParams& system, const SumRuleOptions& opts) {
  system.validate();
  const KernelModel& k = system.kernel;
  const double kbar = k.mean_loss();
  if (!(kbar > 0.0)) throw ConfigError("sum rule: model has no loss");
  const double wa = system.omega_a;
  auto f = [&](double w) { return response_xi(system, w).imag() / kPi; };

  // Linewidth near omega_a sets the innermost panels.
  const double lw = std::max(std::abs(k.loss(wa).real()), 1e-3 * kbar);
  double W = std::max(1000.0 * kbar, 50.0 * lw);
  if (auto P = k.period()) W = std::max(W, opts.min_window_periods * *P);

  SumRuleResult res;
  for (;;) {
    const double tail = 2.0 * kbar / (kPi * W);
    if (tail <= 0.1 * opts.tolerance || W >= opts.max_half_width) {
      if (tail > 0.1 * opts.tolerance)
        throw NumericalError("nonconvergence", "sum rule: tail extension did not converge");
      std::vector<double> pts;
      detail::add_geometric(pts, wa, 0.25 * lw, W);
      const double fs = k.feature_scale();
      for (double c : k.feature_frequencies(wa - W, wa + W)) {
        if (auto P = k.period()) {
          pts.push_back(c);
          for (double d = 0.25 * fs; d < 0.5 * *P; d *= 4.0) {
            pts.push_back(c - d);
            pts.push_back(c + d);
          }
        } else {
          detail::add_geometric(pts, c, 0.25 * std::min(fs, lw * 4.0), W);
        }
      }
      const auto bp = detail::make_breakpoints(std::move(pts), wa - W, wa + W);
      const auto q = detail::integrate_panels(f, bp, 1e-11, 0.01 * opts.tolerance);
      res.value = q.value + tail;
      res.tail = tail;
      res.half_width = W;
      res.quadrature_error = q.error;
      return res;
    }
    W *= 2.0;
    if (auto P = k.period()) W = std::ceil(W / *P) * *P;
  }
}

TimeKernel time_kernel(const KernelModel& model, double dt, std::size_t n_samples,
                       const TimeKernelOptions& opts) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time_kernel: dt must be > 0");
  if (n_samples == 0) throw ConfigError("time_kernel: n_samples must be > 0");

  const auto* fano = std::get_if<FanoMirror>(&model.core());
  if (const auto* fw = std::get_if<FriedrichWintgen>(&model.core())) {
    if (dt * fw->gamma > 0.1) {
      std::ostringstream os;
      os << "time_kernel: dt*gamma = " << dt * fw->gamma << " exceeds 0.1; use dt <= "
         << 0.1 / fw->gamma;
      throw ConfigError(os.str());
    }
  }
  std::size_t steps_per_round_trip = 0;
  if (fano) {
    const double ratio = fano->round_trip / dt;
    steps_per_round_trip = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(steps_per_round_trip)) > 1e-9 * ratio)
      throw ConfigError("time_kernel: fano round-trip time must be an integer multiple of dt");
    if (steps_per_round_trip < 64) throw ConfigError("time_kernel: fano requires dt <= T/64");
    if (std::abs(fano->r_d) >= 1.0)
      throw ConfigError("time_kernel: |r_d| = 1 gives an undamped echo train");
  }

  TimeKernel tk;
  tk.dt = dt;
  tk.center = opts.center;
  tk.loss_instant = model.instantaneous_loss();
  tk.coupling_instant = model.instantaneous_coupling();

  const double mem = model.memory_time();
  const std::size_t span = n_samples + static_cast<std::size_t>(std::ceil(mem / dt));
  const std::size_t L = detail::next_pow2(std::max<std::size_t>(2 * span, 64));
  const double c = opts.center;
  const double nyq = 2.0 * kPi / dt;

  auto spectrum = [&](auto&& rem) {
    std::vector<cplx> P(L);
    for (std::size_t k = 0; k < L; ++k) {
      const double nu = nyq * static_cast<double>(k) / static_cast<double>(L);
      if (fano) {
        // Impulses sit exactly on the grid, so hat weights equal impulse weights.
        P[k] = rem(c + nu);
        continue;
      }
      cplx acc = 0.0;
      for (int m = -opts.alias_terms; m <= opts.alias_terms; ++m) {
        const double v = nu + nyq * m;
        const double x = 0.5 * v * dt;
        const double s = x == 0.0 ? 1.0 : std::sin(x) / x;
        acc += rem(c + v) * (s * s);
      }
      P[k] = acc;
    }
    auto h = detail::dft(P, detail::FftPlan::Direction::Forward);
    for (auto& x : h) x /= static_cast<double>(L);
    return h;
  };

  const double kl_inf = tk.loss_instant;
  const cplx kc_inf = tk.coupling_instant;
  auto hl = spectrum([&](double w) { return model.loss(w) - kl_inf; });
  auto hc = spectrum([&](double w) { return model.coupling(w) - kc_inf; });
  hl[0] += kl_inf;
  hc[0] += kc_inf;

  auto violation = [&](const std::vector<cplx>& h) {
    double pos = 0.0, neg = 0.0;
    for (std::size_t j = 0; j < L; ++j) (j < L / 2 ? pos : neg) += std::norm(h[j]);
    const double tot = pos + neg;
    return tot > 0.0 ? neg / tot : 0.0;
  };
  tk.causality_violation = std::max(violation(hl), violation(hc));
  if (tk.causality_violation > opts.causality_threshold) {
    std::ostringstream os;
    os << "time_kernel: causality violation " << tk.causality_violation << " exceeds "
       << opts.causality_threshold;
    throw NumericalError("causality", os.str());
  }

  const std::size_t n = std::min(n_samples, L / 2);
  tk.loss.resize(n_samples);
  tk.coupling.resize(n_samples);
  for (std::size_t j = 0; j < n; ++j) {
    tk.loss[j] = hl[j] / dt;
    tk.coupling[j] = hc[j] / dt;
  }
  return tk;
}

}  // namespace nmk
