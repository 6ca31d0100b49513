#pragma once

#include <optional>
#include <string>

#include "output.hpp"

namespace cli {

// Frequencies, times and fluxes below are in the model's units (normalized or
// absolute); photon numbers are dimensionless.

struct KernelScanArgs {
  std::optional<double> from, to;
  std::size_t points = 2001;
  std::string stem = "kernel";
};
void kernel_scan(Context& ctx, const KernelScanArgs& a);

struct SweepArgs {
  double omega_p = 0.0;
  std::optional<double> flux_max;
  std::size_t points = 400;
  bool log = false;
  std::string stem = "sweep";
};
void sweep(Context& ctx, const SweepArgs& a);

struct NoiseArgs {
  double omega_p = 0.0;
  std::optional<double> n;  // single point: failures are fatal
  double n_min = 1e2, n_max = 1e8;
  std::size_t points = 200;
  bool linear = false;
  bool exact = true;
  std::string stem = "noise";
};
void noise(Context& ctx, const NoiseArgs& a);

struct SpectrumArgs {
  double omega_p = 0.0;
  double n = 0.0;
  std::optional<double> omega_max;
  std::size_t points = 4001;
  std::string stem = "noise_spectrum";
};
void noise_spectrum(Context& ctx, const SpectrumArgs& a);

struct PhaseArgs {
  double w_min = 0.99, w_max = 1.03;
  double n_min = 1e6, n_max = 3e8;
  std::size_t nw = 200, nn = 200;
  bool linear_n = false;
  std::string stem = "phase_diagram";
};
void phase_diagram(Context& ctx, const PhaseArgs& a);

struct TransientArgs {
  double omega_p = 0.0;
  std::optional<double> n;     // start next to the steady state with this photon number
  std::optional<double> flux;  // or drive with this flux from the vacuum
  std::optional<double> t_end, dt;
  std::string method = "auto";  // auto, two-mode, split-step
  double kick = 0.01;           // relative perturbation of the starting field
  std::size_t samples = 20000;
  double window = 0.5;          // diagnose only
  std::string stem = "transient";
};
void transient(Context& ctx, const TransientArgs& a);
void diagnose(Context& ctx, const TransientArgs& a);

// Returns true when every check passes.
bool validate(Context& ctx);

// Extra tables used by the figure presets.
void eigenvalue_scan(Context& ctx, double omega_p, double n_min, double n_max, std::size_t points,
                     const std::string& stem);
void noise_map(Context& ctx, const PhaseArgs& a);

void reproduce(Context& ctx, const std::string& preset);
std::vector<std::string> preset_names();

}  // namespace cli
