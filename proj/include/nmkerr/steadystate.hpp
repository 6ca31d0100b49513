#pragma once

#include <span>
#include <string>
#include <vector>

#include "nmkerr/kernels.hpp"

namespace nmk {

struct Drive {
  double omega_p = 0.0;
  double flux = 0.0;  // |s0|^2
};

enum class Stability { Unknown, Stable, SaddleUnstable, MIUnstable };

std::string to_string(Stability s);

struct SteadyState {
  double n = 0.0;
  cplx alpha0;              // real and positive, sqrt(n)
  double omega_ap = 0.0;    // omega_a - omega_p
  double pump_phase = 0.0;  // s0 = sqrt(flux) e^{i pump_phase} makes alpha0 real
  Stability stability = Stability::Unknown;
};

// Nonnegative real roots of
//   [(omega_a + beta n + K_l''(omega_p) - omega_p)^2 + K_l'(omega_p)^2] n = flux |K_c(omega_p)|^2
// in ascending order.
std::vector<SteadyState> steady_roots(const SystemParams& system, const Drive& drive);

// Flux that sustains photon number n at pump frequency omega_p.
double pump_for_n(const SystemParams& system, double omega_p, double n);

// Steady state on the branch with photon number n (the inverse of pump_for_n).
SteadyState steady_state_at(const SystemParams& system, double omega_p, double n);

struct BistabilityInfo {
  double delta = 0.0;      // omega_p - omega_a - K_l''(omega_p)
  double threshold = 0.0;  // sqrt(3) K_l'(omega_p)
  bool bistable = false;
};

BistabilityInfo bistability_threshold(const SystemParams& system, double omega_p);

struct BranchPoint {
  double flux = 0.0;
  std::vector<SteadyState> roots;
};

struct BranchSweep {
  double omega_p = 0.0;
  std::vector<BranchPoint> points;
  std::vector<double> turning_points;  // ascending flux values
};

BranchSweep sweep_input_output(const SystemParams& system, double omega_p,
                               std::span<const double> flux_grid, unsigned threads = 1);

}  // namespace nmk
