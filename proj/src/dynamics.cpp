#include "nmkerr/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "nmkerr/errors.hpp"

namespace nmk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

using detail::FftPlan;

double expected_beta_n(const SystemParams& sys, const Drive& drive, const SimOptions& opts) {
  if (opts.expected_n) return sys.beta * *opts.expected_n;
  const auto roots = steady_roots(sys, drive);
  return sys.beta * (roots.empty() ? 0.0 : roots.back().n);
}

void check_finite(cplx a, double t) {
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
    std::ostringstream os;
    os << "blow-up: reduce dt or flux (non-finite field at t = " << t << ")";
    throw NumericalError("blowup", os.str());
  }
}

void check_step(double dt, double t_end) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be > 0");
}

std::size_t stride_for(std::size_t steps, std::size_t max_samples) {
  if (max_samples == 0) max_samples = 1;
  return std::max<std::size_t>(1, (steps + max_samples) / max_samples);
}

// phi1(z) = (1 - e^{-z})/z and phi2(z) = (1 - phi1(z))/z.
void phi_functions(cplx z, cplx& e, cplx& p1, cplx& p2) {
  e = std::exp(-z);
  if (std::abs(z) < 1e-4) {
    p1 = 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0;
    p2 = 0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0;
  } else {
    p1 = (1.0 - e) / z;
    p2 = (1.0 - p1) / z;
  }
}

}  // namespace

TwoModeFixedPoint two_mode_fixed_point(const SystemParams& system, double omega_p, double n) {
  const auto* fw = std::get_if<FriedrichWintgen>(&system.kernel.core());
  if (!fw) throw ConfigError("two-mode model requires a Friedrich-Wintgen kernel");
  TwoModeFixedPoint fp;
  fp.flux = n > 0.0 ? pump_for_n(system, omega_p, n) : 0.0;
  const SteadyState st = steady_state_at(system, omega_p, n);
  fp.pump_phase = st.pump_phase;
  const cplx s0 = std::sqrt(fp.flux) * std::exp(I * fp.pump_phase);
  const double c = std::sqrt(fw->kappa * fw->gamma);
  fp.state.alpha = st.alpha0;
  fp.state.d = (-c * st.alpha0 + std::sqrt(2.0 * fw->gamma) * s0) /
               (fw->gamma + I * (fw->omega_d - omega_p));
  return fp;
}

Trajectory simulate_two_mode(const SystemParams& system, const Drive& drive, double t_end,
                             double dt, const TwoModeInitial& initial, const SimOptions& opts) {
  system.validate();
  check_step(dt, t_end);
  const auto* fw = std::get_if<FriedrichWintgen>(&system.kernel.core());
  if (!fw) throw ConfigError("two-mode model requires a Friedrich-Wintgen kernel");
  if (!(drive.flux >= 0.0)) throw ConfigError("drive flux must be >= 0");

  const double wap = system.omega_a - drive.omega_p;
  const double wdp = fw->omega_d - drive.omega_p;
  const double ka = fw->kappa + system.kernel.background();
  const double g = fw->gamma;
  const double c = std::sqrt(fw->kappa * g);
  const double bn = expected_beta_n(system, drive, opts);
  const double rate = std::max({g, std::abs(wap), std::abs(wdp), bn, ka});
  if (dt * rate > 0.05) {
    std::ostringstream os;
    os << "dt too large for the two-mode integrator: dt*max rate = " << dt * rate
       << " > 0.05; suggested dt <= " << 0.05 / rate;
    throw ConfigError(os.str());
  }

  const cplx s0 = std::sqrt(drive.flux) * std::exp(I * opts.pump_phase);
  const cplx fa = std::sqrt(2.0 * fw->kappa) * s0;
  const cplx fd = std::sqrt(2.0 * g) * s0;
  const double beta = system.beta;
  auto rhs = [&](cplx a, cplx d, cplx& da, cplx& dd) {
    da = -I * (wap + beta * std::norm(a)) * a - ka * a - c * d + fa;
    dd = -I * wdp * d - g * d - c * a + fd;
  };

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  Trajectory tr;
  tr.drive = drive;
  tr.pump_phase = opts.pump_phase;
  tr.dt = dt;
  tr.method = "two-mode";
  tr.stride = stride_for(steps + 1, opts.max_samples);
  const std::size_t cap = steps / tr.stride + 1;
  tr.t.reserve(cap);
  tr.alpha.reserve(cap);
  tr.n.reserve(cap);
  tr.d.reserve(cap);

  cplx a = initial.alpha, d = initial.d;
  auto record = [&](std::size_t k) {
    tr.t.push_back(k * dt);
    tr.alpha.push_back(a);
    tr.n.push_back(std::norm(a));
    tr.d.push_back(d);
  };
  record(0);
  for (std::size_t k = 1; k <= steps; ++k) {
    cplx k1a, k1d, k2a, k2d, k3a, k3d, k4a, k4d;
    rhs(a, d, k1a, k1d);
    rhs(a + 0.5 * dt * k1a, d + 0.5 * dt * k1d, k2a, k2d);
    rhs(a + 0.5 * dt * k2a, d + 0.5 * dt * k2d, k3a, k3d);
    rhs(a + dt * k3a, d + dt * k3d, k4a, k4d);
    a += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    d += dt / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    check_finite(a, k * dt);
    if (k % tr.stride == 0) record(k);
  }
  return tr;
}

Trajectory simulate_split_step(const SystemParams& system, const Drive& drive, double t_end,
                               double dt, cplx initial, const SimOptions& opts) {
  system.validate();
  check_step(dt, t_end);
  if (!(drive.flux >= 0.0)) throw ConfigError("drive flux must be >= 0");
  const KernelModel& k = system.kernel;

  if (const auto* f = std::get_if<FanoMirror>(&k.core())) {
    const double per = std::ceil(f->round_trip / dt - 1e-9);
    dt = f->round_trip / std::max(per, 64.0);
  }
  const double bn = expected_beta_n(system, drive, opts);
  if (dt * bn > 0.05) {
    std::ostringstream os;
    os << "dt too large for the Kerr rotation: dt*beta*n = " << dt * bn << " > 0.05";
    throw ConfigError(os.str());
  }
  const double mem = k.memory_time();
  if (t_end < 10.0 * mem) {
    std::ostringstream os;
    os << "simulation window " << t_end << " shorter than 10 kernel memory times (" << 10.0 * mem
       << ")";
    throw ConfigError(os.str());
  }

  const auto n_taps = static_cast<std::size_t>(std::ceil(mem / dt)) + 2;
  TimeKernelOptions tko;
  tko.center = drive.omega_p;
  const TimeKernel tk = time_kernel(k, dt, n_taps, tko);

  // Absolute hat weights with the instantaneous parts removed.
  const double kl_inf = tk.loss_instant;
  const cplx kc_inf = tk.coupling_instant;
  const cplx h0 = tk.loss[0] * dt - kl_inf;
  std::vector<cplx> past_taps(n_taps - 1);
  for (std::size_t j = 1; j < n_taps; ++j) past_taps[j - 1] = tk.loss[j] * dt;
  std::vector<cplx> hc(n_taps);
  for (std::size_t j = 0; j < n_taps; ++j) hc[j] = tk.coupling[j] * dt;
  hc[0] -= kc_inf;

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  // Integrated drive response C_j ~ K_c,inf + int_0^{t_j} K_c,rem; constant after the memory.
  std::vector<cplx> C(std::min(steps, n_taps) + 1);
  cplx acc = 0.0;
  C[0] = kc_inf;
  for (std::size_t j = 1; j < C.size(); ++j) {
    acc += hc[j - 1];
    C[j] = kc_inf + acc + (j < n_taps ? 0.5 * hc[j] : cplx(0.0));
  }
  auto C_at = [&](std::size_t j) { return C[std::min(j, C.size() - 1)]; };

  const cplx s0 = std::sqrt(drive.flux) * std::exp(I * opts.pump_phase);
  const double wap = system.omega_a - drive.omega_p;
  const double beta = system.beta;
  auto cz = [&](double intensity) { return (kl_inf + I * (wap + beta * intensity)) * dt; };

  Trajectory tr;
  tr.drive = drive;
  tr.pump_phase = opts.pump_phase;
  tr.dt = dt;
  tr.method = "split-step";
  tr.stride = stride_for(steps + 1, opts.max_samples);
  const std::size_t cap = steps / tr.stride + 1;
  tr.t.reserve(cap);
  tr.alpha.reserve(cap);
  tr.n.reserve(cap);

  CausalConvolver conv(past_taps);
  cplx a = initial;
  cplx past = 0.0;  // sum_{j>=1} H_j A_{n-j}
  tr.t.push_back(0.0);
  tr.alpha.push_back(a);
  tr.n.push_back(std::norm(a));
  for (std::size_t step = 0; step < steps; ++step) {
    const cplx past_next = past_taps.empty() ? cplx(0.0) : conv.push(a);
    const cplx g0 = -(h0 * a + past) + s0 * C_at(step);
    const double i0 = std::norm(a);
    cplx e, p1, p2;
    phi_functions(cz(i0), e, p1, p2);
    cplx ap = e * a + dt * p1 * g0;
    for (int it = 0; it < 2; ++it) {
      const cplx g1 = -(h0 * ap + past_next) + s0 * C_at(step + 1);
      phi_functions(cz(0.5 * (i0 + std::norm(ap))), e, p1, p2);
      ap = e * a + dt * (p1 * g0 + p2 * (g1 - g0));
    }
    a = ap;
    past = past_next;
    check_finite(a, (step + 1) * dt);
    if ((step + 1) % tr.stride == 0) {
      tr.t.push_back((step + 1) * dt);
      tr.alpha.push_back(a);
      tr.n.push_back(std::norm(a));
    }
  }
  return tr;
}

struct CausalConvolver::Impl {
  std::size_t B = 0;
  std::vector<cplx> h;
  std::vector<std::vector<cplx>> hspec;  // partitions 1..P-1
  std::deque<std::vector<cplx>> fdl;     // input spectra, most recent first
  std::vector<cplx> cur, prev, tail;
  std::size_t r = 0;
  std::unique_ptr<FftPlan> fwd, bwd;

  cplx push(cplx x) {
    cur[r] = x;
    cplx y = tail[r];
    const std::size_t nn = std::min(B, h.size());
    for (std::size_t j = 0; j < nn; ++j) {
      const cplx xv = j <= r ? cur[r - j] : prev[B + r - j];
      y += h[j] * xv;
    }
    if (++r == B) finish_block();
    return y;
  }

  void finish_block() {
    r = 0;
    if (!hspec.empty()) {
      std::copy(prev.begin(), prev.end(), fwd->in());
      std::copy(cur.begin(), cur.end(), fwd->in() + B);
      fwd->execute();
      fdl.emplace_front(fwd->out(), fwd->out() + 2 * B);
      if (fdl.size() > hspec.size()) fdl.pop_back();
      std::fill(bwd->in(), bwd->in() + 2 * B, cplx(0.0));
      for (std::size_t p = 0; p < fdl.size(); ++p) {
        const auto& X = fdl[p];
        const auto& H = hspec[p];
        for (std::size_t i = 0; i < 2 * B; ++i) bwd->in()[i] += H[i] * X[i];
      }
      bwd->execute();
      const double norm = 1.0 / static_cast<double>(2 * B);
      for (std::size_t i = 0; i < B; ++i) tail[i] = bwd->out()[B + i] * norm;
    }
    std::swap(prev, cur);
  }
};

CausalConvolver::CausalConvolver(std::vector<cplx> taps, std::size_t block)
    : impl_(std::make_unique<Impl>()) {
  auto& m = *impl_;
  if (block == 0) {
    const auto root = static_cast<std::size_t>(std::sqrt(static_cast<double>(taps.size())));
    block = detail::next_pow2(std::clamp<std::size_t>(root, 16, 1024));
  }
  m.B = block;
  m.h = std::move(taps);
  m.cur.assign(m.B, 0.0);
  m.prev.assign(m.B, 0.0);
  m.tail.assign(m.B, 0.0);
  const std::size_t P = (m.h.size() + m.B - 1) / m.B;
  if (P > 1) {
    m.fwd = std::make_unique<FftPlan>(2 * m.B, FftPlan::Direction::Forward);
    m.bwd = std::make_unique<FftPlan>(2 * m.B, FftPlan::Direction::Backward);
    for (std::size_t p = 1; p < P; ++p) {
      std::fill(m.fwd->in(), m.fwd->in() + 2 * m.B, cplx(0.0));
      const std::size_t end = std::min(m.h.size(), (p + 1) * m.B);
      std::copy(m.h.begin() + p * m.B, m.h.begin() + end, m.fwd->in());
      m.fwd->execute();
      m.hspec.emplace_back(m.fwd->out(), m.fwd->out() + 2 * m.B);
    }
  }
}

CausalConvolver::~CausalConvolver() = default;
CausalConvolver::CausalConvolver(CausalConvolver&&) noexcept = default;
CausalConvolver& CausalConvolver::operator=(CausalConvolver&&) noexcept = default;

cplx CausalConvolver::push(cplx x) { return impl_->push(x); }
std::size_t CausalConvolver::block_size() const { return impl_->B; }

PulsingDiagnostics diagnose_pulsing(const Trajectory& traj, double window_fraction,
                                    std::optional<double> expected_freq) {
  if (!(window_fraction > 0.0 && window_fraction <= 1.0))
    throw ConfigError("window fraction must be in (0, 1]");
  const std::size_t N = traj.n.size();
  if (N < 16) throw ConfigError("trajectory too short to diagnose");
  const std::size_t nw = std::max<std::size_t>(16, static_cast<std::size_t>(window_fraction * N));
  const std::size_t i0 = N - nw;
  const double ts = traj.t[1] - traj.t[0];
  const double Tw = ts * static_cast<double>(nw - 1);

  PulsingDiagnostics dg;
  dg.window = Tw;
  double mn = traj.n[i0], mx = traj.n[i0], sum = 0.0;
  for (std::size_t i = i0; i < N; ++i) {
    mn = std::min(mn, traj.n[i]);
    mx = std::max(mx, traj.n[i]);
    sum += traj.n[i];
  }
  dg.mean_n = sum / static_cast<double>(nw);
  dg.swing_fraction = dg.mean_n > 0.0 ? (mx - mn) / dg.mean_n : 0.0;
  if (!(mx - mn > 1e-12 * std::max(dg.mean_n, 1e-300))) return dg;

  // Linear detrend, Hann window, zero-padded spectrum.
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < nw; ++i) {
    const double x = static_cast<double>(i);
    const double y = traj.n[i0 + i];
    st += x;
    sy += y;
    stt += x * x;
    sty += x * y;
  }
  const double dn = static_cast<double>(nw);
  const double slope = (dn * sty - st * sy) / (dn * stt - st * st);
  const double icpt = (sy - slope * st) / dn;
  const std::size_t L = detail::next_pow2(4 * nw);
  std::vector<cplx> buf(L, 0.0);
  for (std::size_t i = 0; i < nw; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / (dn - 1.0));
    buf[i] = w * (traj.n[i0 + i] - (icpt + slope * static_cast<double>(i)));
  }
  const auto spec = detail::dft(buf, FftPlan::Direction::Forward);
  std::size_t kmax = 1;
  for (std::size_t kk = 2; kk < L / 2; ++kk)
    if (std::abs(spec[kk]) > std::abs(spec[kmax])) kmax = kk;
  double kf = static_cast<double>(kmax);
  if (kmax > 1 && kmax + 1 < L / 2) {
    const double a = std::log(std::abs(spec[kmax - 1]) + 1e-300);
    const double b = std::log(std::abs(spec[kmax]) + 1e-300);
    const double c = std::log(std::abs(spec[kmax + 1]) + 1e-300);
    const double den = a - 2.0 * b + c;
    if (den != 0.0) kf += 0.5 * (a - c) / den;
  }
  dg.dominant_freq = 2.0 * kPi * kf / (static_cast<double>(L) * ts);

  const double fref = expected_freq.value_or(dg.dominant_freq);
  const double periods = Tw * fref / (2.0 * kPi);
  if (periods < 20.0) {
    std::ostringstream os;
    os << "analysis window holds " << periods << " oscillation periods; at least 20 required";
    throw ConfigError(os.str());
  }

  // Envelope decay from per-segment swings, two periods per segment.
  const double period = 2.0 * kPi / fref;
  const auto seg = std::max<std::size_t>(4, static_cast<std::size_t>(2.0 * period / ts));
  std::vector<double> tx, ly;
  for (std::size_t s = i0; s + seg <= N; s += seg) {
    double lo = traj.n[s], hi = traj.n[s];
    for (std::size_t i = s; i < s + seg; ++i) {
      lo = std::min(lo, traj.n[i]);
      hi = std::max(hi, traj.n[i]);
    }
    if (hi - lo > 0.0) {
      tx.push_back(traj.t[s] + 0.5 * seg * ts);
      ly.push_back(std::log(hi - lo));
    }
  }
  if (tx.size() >= 2) {
    double a = 0.0, b = 0.0, aa = 0.0, ab = 0.0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
      a += tx[i];
      b += ly[i];
      aa += tx[i] * tx[i];
      ab += tx[i] * ly[i];
    }
    const double m = static_cast<double>(tx.size());
    dg.decay_rate = -(m * ab - a * b) / (m * aa - a * a);
  }
  dg.is_pulsing = dg.swing_fraction > 1e-6 && dg.decay_rate < 0.1 / Tw;
  return dg;
}

}  // namespace nmk
