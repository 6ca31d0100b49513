#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nmkerr/kernels.hpp"
#include "nmkerr/steadystate.hpp"

namespace nmk {

// Uniformly sampled mean-field trajectory in the frame rotating at omega_p.
struct Trajectory {
  std::vector<double> t;
  std::vector<cplx> alpha;
  std::vector<double> n;
  std::vector<cplx> d;  // auxiliary mode, two-mode runs only
  Drive drive;
  double pump_phase = 0.0;
  double dt = 0.0;          // integration step
  std::size_t stride = 1;   // integration steps per stored sample
  std::string method;
};

struct TwoModeInitial {
  cplx alpha;
  cplx d;
};

struct SimOptions {
  double pump_phase = 0.0;                 // s0 = sqrt(flux) e^{i pump_phase}
  std::optional<double> expected_n;        // for the step-size check; defaults to the largest root
  std::size_t max_samples = 1'000'000;     // stored samples are decimated to at most this
};

// Fixed point of the two-mode equations at steady-state photon number n, with the
// pump phase chosen so that alpha is real and positive.
struct TwoModeFixedPoint {
  TwoModeInitial state;
  double pump_phase = 0.0;
  double flux = 0.0;
};
TwoModeFixedPoint two_mode_fixed_point(const SystemParams& system, double omega_p, double n);

// Classical two-mode equations, fixed-step RK4:
//   a' = -i(omega_ap + beta|a|^2) a - (kappa + kappa_bg) a - sqrt(kappa gamma) d + sqrt(2 kappa) s0
//   d' = -i omega_dp d - gamma d - sqrt(kappa gamma) a + sqrt(2 gamma) s0
Trajectory simulate_two_mode(const SystemParams& system, const Drive& drive, double t_end,
                             double dt, const TwoModeInitial& initial,
                             const SimOptions& opts = {});

// Single-mode memory-kernel equation for any kernel. The drive switches on at
// t = 0 and the field history before t = 0 is zero. For comb kernels dt is
// reduced so that the round trip is an integer number of steps.
Trajectory simulate_split_step(const SystemParams& system, const Drive& drive, double t_end,
                               double dt, cplx initial, const SimOptions& opts = {});

// Online causal convolution y_m = sum_j h_j x_{m-j}: direct sums over the first
// block of taps and uniformly partitioned overlap-save for the rest.
class CausalConvolver {
 public:
  CausalConvolver(std::vector<cplx> taps, std::size_t block = 0);
  ~CausalConvolver();
  CausalConvolver(CausalConvolver&&) noexcept;
  CausalConvolver& operator=(CausalConvolver&&) noexcept;

  // Appends x_m and returns y_m.
  cplx push(cplx x);
  std::size_t block_size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct PulsingDiagnostics {
  bool is_pulsing = false;
  double dominant_freq = 0.0;   // angular frequency of the strongest modulation
  double swing_fraction = 0.0;  // (max n - min n) / mean n over the window
  double mean_n = 0.0;
  double decay_rate = 0.0;      // envelope decay rate; negative when growing
  double window = 0.0;          // analysed duration
};

// Analyses the final `window_fraction` of the trajectory. When expected_freq is
// given it sets the minimum window length (20 periods); otherwise the detected
// frequency does.
PulsingDiagnostics diagnose_pulsing(const Trajectory& traj, double window_fraction = 0.5,
                                    std::optional<double> expected_freq = std::nullopt);

}  // namespace nmk
