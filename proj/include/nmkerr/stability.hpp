#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nmkerr/kernels.hpp"
#include "nmkerr/steadystate.hpp"

namespace nmk {

// Linearization of the two-mode model in the quadrature basis
// (dX_a, dY_a, dX_d, dY_d), frame rotating at omega_p.
using FluctuationMatrix = Eigen::Matrix4d;

FluctuationMatrix fw_matrix(const SystemParams& system, double omega_p, double n);

struct StabilityReport {
  std::vector<cplx> eigenvalues;  // empty when the classification is not eigenvalue based
  Stability cls = Stability::Unknown;
  double mi_gain = 0.0;           // largest positive Re of a complex pair, else 0
  double re_lambda_max = 0.0;
  double im_lambda = 0.0;         // |Im| of the dominant complex pair
  double pulse_freq = 0.0;        // sqrt(Omega^2 - (Gamma/2)^2)
  std::string method;             // "eigen", "adiabatic", "winding"
};

// Default threshold: 1e-6 times the sum of the model rates.
double default_epsilon(const SystemParams& system);

StabilityReport classify(const SystemParams& system, double omega_p, double n,
                         std::optional<double> epsilon = std::nullopt);

// Real part of the leading eigenvalue in the adiabatic picture,
// -(k+ + k-)/2 - (Delta/Omega)(k+ - k-)/2 with k+- = Re K_l(omega_p +- Omega).
double adiabatic_re_lambda(const SystemParams& system, double omega_p, double n);

// 1 + r Delta/Omega; its zero is the adiabatic MI boundary.
double adiabatic_mi_margin(const SystemParams& system, double omega_p, double n);

struct PhaseCell {
  double omega_p = 0.0;
  double n = 0.0;
  Stability cls = Stability::Unknown;
  double mi_gain = 0.0;
  double re_lambda_max = 0.0;
  double im_lambda = 0.0;
};

struct PhaseDiagram {
  std::vector<double> omega_p;
  std::vector<double> n;
  std::vector<PhaseCell> cells;  // row-major: index = i_n * omega_p.size() + i_w

  const PhaseCell& at(std::size_t i_w, std::size_t i_n) const {
    return cells[i_n * omega_p.size() + i_w];
  }
};

PhaseDiagram phase_diagram(const SystemParams& system, std::span<const double> omega_p_grid,
                           std::span<const double> n_grid, unsigned threads = 0,
                           std::optional<double> epsilon = std::nullopt);

}  // namespace nmk
