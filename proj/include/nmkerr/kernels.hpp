#pragma once

// Frequency-domain loss and coupling kernels of a resonance with
// frequency-dependent environment coupling.
//
// Conventions: K(omega) = \int dt e^{i omega t} K(t), so causal kernels are
// analytic in the upper half plane. All quantities are expected in units of the
// bare resonance frequency (omega_a = 1); nothing here depends on that choice
// except for the tolerances, which are relative to the model rates.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace nmk {

using cplx = std::complex<double>;

struct Markovian {
  double gamma = 0.0;
};

// Two resonances a and d sharing one continuum; loss of a vanishes at omega_d.
struct FriedrichWintgen {
  double kappa = 0.0;
  double gamma = 0.0;
  double omega_d = 0.0;
};

// Fabry-Perot cavity closed by a Fano mirror. theta2 is tied to (r_d, t_d, sigma)
// through e^{2i theta2} = r_d - i t_d sigma; theta1 only sets the global phase of
// the coupling.
struct FanoMirror {
  double kappa = 0.0;
  double r_d = 0.0;
  double t_d = 0.0;
  int sigma = 1;
  double round_trip = 0.0;  // T
  double theta1 = 0.0;
  double theta2 = 0.0;
};

class KernelModel {
 public:
  using Core = std::variant<Markovian, FriedrichWintgen, FanoMirror>;

  static KernelModel markovian(double gamma);
  static KernelModel friedrich_wintgen(double kappa, double gamma, double omega_d);
  // theta2 defaults to the branch of (1/2) arg(r_d - i t_d sigma) in (-pi/2, pi/2];
  // theta1 defaults to the value that keeps |K_c|^2 = 2 Re K_l (theta2 for
  // sigma = +1, theta2 - pi for sigma = -1).
  static KernelModel fano_mirror(double kappa, double r_d, double t_d, int sigma,
                                 double round_trip,
                                 std::optional<double> theta1 = std::nullopt,
                                 std::optional<double> theta2 = std::nullopt);

  // Adds a frequency-independent non-radiative loss to Re K_l. Background
  // channels accumulate.
  KernelModel with_background(double kappa_bg) const;

  cplx loss(double omega) const;
  cplx coupling(double omega) const;

  const Core& core() const noexcept { return core_; }
  double background() const noexcept { return kappa_bg_; }
  bool has_background() const noexcept { return kappa_bg_ > 0.0; }

  template <class T>
  bool is() const noexcept {
    return std::holds_alternative<T>(core_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(core_);
  }

  std::string name() const;

  // Weight of the instantaneous (delta at tau = 0) part of K_l(tau), including
  // the background, and of K_c(tau).
  double instantaneous_loss() const;
  cplx instantaneous_coupling() const;

  // Large-|omega| average of Re K_l (period average for the Fano comb),
  // including the background. Governs the 1/omega^2 tails of noise integrals.
  double mean_loss() const;

  // Narrowest frequency scale on which the kernel varies; infinity for the
  // Markovian model.
  double feature_scale() const;

  // Frequencies in [lo, hi] where the kernel has structure (loss zeros, comb
  // teeth). Used to place quadrature breakpoints.
  std::vector<double> feature_frequencies(double lo, double hi) const;

  // Frequency period of a comb-like kernel, if any.
  std::optional<double> period() const;

  // Time after which |K(tau)| stays below 1e-8 of its peak.
  double memory_time() const;

  // Largest rate in the model, used for relative tolerances.
  double rate_scale() const;

 private:
  explicit KernelModel(Core core) : core_(std::move(core)) {}
  void validate() const;

  Core core_;
  double kappa_bg_ = 0.0;
};

struct ComplexKernelSample {
  double omega = 0.0;
  cplx loss;
  cplx coupling;
};

struct SystemParams {
  double omega_a = 1.0;
  double beta = 0.0;
  KernelModel kernel = KernelModel::markovian(0.0);

  void validate() const;
};

std::vector<ComplexKernelSample> scan_kernel(const KernelModel& model,
                                             std::span<const double> omegas);

// max over the grid of |2 Re K_l - |K_c|^2|. Rejects models with background loss,
// which break the identity by exactly 2 kappa_bg.
double kk_residual(const KernelModel& model, std::span<const double> omegas);

// Linear response function with Im xi >= 0 wherever Re K_l > 0:
// xi(omega) = i / (i (omega_a - omega) + K_l(omega)).
cplx response_xi(const SystemParams& system, double omega);

struct SumRuleOptions {
  double tolerance = 1e-4;        // absolute, on the returned value
  double min_window_periods = 8;  // comb kernels: minimum window in periods
  double max_half_width = 1e6;    // in units of omega_a
};

struct SumRuleResult {
  double value = 0.0;       // \int d omega Im xi / pi
  double tail = 0.0;        // analytic tail beyond the integrated window
  double half_width = 0.0;  // integrated window is omega_a +- half_width
  double quadrature_error = 0.0;
};

// Evaluates the commutator integral \int d omega Im xi(omega) / pi, which must
// equal 1 for any causal, Kramers-Kronig consistent kernel. The window around
// omega_a grows until the analytic 1/omega^2 tail is below the tolerance.
SumRuleResult sum_rule_check(const SystemParams& system, const SumRuleOptions& opts = {});

// Hat-function (piecewise-linear) weights of the time-domain kernels, divided by
// dt, in the frame rotating at `center`:
//   \int d tau K(tau) e^{i center tau} f(t - tau) ~= dt * sum_j samples[j] f(t - j dt)
// exactly for piecewise-linear f. The instantaneous part sits in samples[0].
struct TimeKernel {
  double dt = 0.0;
  double center = 0.0;
  std::vector<cplx> loss;
  std::vector<cplx> coupling;
  double loss_instant = 0.0;      // delta weight included in loss[0] * dt
  cplx coupling_instant;          // delta weight included in coupling[0] * dt
  double causality_violation = 0.0;  // energy fraction at tau < 0
};

struct TimeKernelOptions {
  double center = 0.0;
  double causality_threshold = 1e-6;
  int alias_terms = 128;  // periodization terms on each side for non-comb kernels
};

TimeKernel time_kernel(const KernelModel& model, double dt, std::size_t n_samples,
                       const TimeKernelOptions& opts = {});

}  // namespace nmk
