#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nmkerr/kernels.hpp"
#include "nmkerr/steadystate.hpp"

namespace nmk {

// Steady state about which fluctuations are linearized, with the scalars of the
// relaxation-oscillation picture.
struct LinearizedPoint {
  SystemParams system;
  Drive drive;
  double n = 0.0;
  double omega_ap = 0.0;  // omega_a - omega_p
  double Delta = 0.0;     // omega_ap + 2 beta n
  cplx Omega;             // sqrt(Delta^2 - (beta n)^2), imaginary inside the saddle band

  double beta_n() const { return system.beta * n; }
};

// Point on the branch with photon number n; the flux follows from pump_for_n.
LinearizedPoint linearize(const SystemParams& system, double omega_p, double n);
// Point at a root returned by steady_roots for this drive.
LinearizedPoint linearize(const SystemParams& system, const Drive& drive, const SteadyState& root);

struct FluctuationKernel {
  double omega = 0.0;
  cplx eta_plus;       // eta(omega)
  cplx eta_minus_conj; // eta*(-omega)
  cplx M;              // eta(omega) eta*(-omega) - (beta n)^2
  double Omega2 = 0.0;
  double Gamma2 = 0.0;
  double kappa_plus = 0.0, kappa_minus = 0.0;  // Re K_l(omega_p +- omega)
  double delta_plus = 0.0, delta_minus = 0.0;  // Im K_l(omega_p +- omega)
};

FluctuationKernel fluctuation_kernel(const LinearizedPoint& pt, double omega);

// delta a(omega) = p(omega) delta s(omega) + q*(-omega) delta s^dagger(-omega).
std::pair<cplx, cplx> transfer_pq(const LinearizedPoint& pt, double omega);

enum class NoiseMethod { ExactIntegral, Adiabatic };

struct NoiseResult {
  double var_x = 0.0;
  double var_y = 0.0;
  double fano = 0.0;  // equals var_x for a real mean field
  NoiseMethod method = NoiseMethod::ExactIntegral;
  double gamma2 = 0.0;        // adiabatic only
  double error_estimate = 0.0;
  bool adiabatic_advisory = false;  // kernel bandwidth below 10 cavity linewidths
};

struct NoiseQuadConfig {
  double abs_tol = 1e-6;
  double panel_rel_tol = 1e-10;
  int min_periods = 48;  // comb kernels: integrate at least this many periods each side
};

// Number of zeros of M(omega) in the upper half plane, by the argument
// principle along the real axis. Nonzero means the linearized dynamics grow.
struct WindingResult {
  int unstable_roots = 0;
  double min_abs_m = 0.0;
  double omega_at_min = 0.0;
  bool singular = false;  // a zero sits on (or numerically at) the real axis
};

WindingResult count_unstable_roots(const LinearizedPoint& pt);

NoiseResult variance_exact(const LinearizedPoint& pt, const NoiseQuadConfig& cfg = {});
// sigma = +1 for X, -1 for Y.
double quadrature_variance_exact(const LinearizedPoint& pt, int sigma,
                                 const NoiseQuadConfig& cfg = {});

NoiseResult variance_adiabatic(const LinearizedPoint& pt);

// (d K_l'/d omega) / K_l' at omega_p.
double sharp_loss_slope(const SystemParams& system, double omega_p);

struct SpectrumSample {
  double omega = 0.0;
  double sx = 0.0;  // |p + q|^2 plus background-channel vacuum
  double sy = 0.0;
};

// Spectral densities whose integral over d omega / 2 pi gives the variances.
std::vector<SpectrumSample> noise_spectrum(const LinearizedPoint& pt,
                                           std::span<const double> omegas);

// Sideband frequency of the positive-frequency noise peak, where |M| is smallest.
double noise_peak_frequency(const LinearizedPoint& pt);

}  // namespace nmk
