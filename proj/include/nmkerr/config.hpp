#pragma once

#include <string>

#include <json.hpp>

#include "nmkerr/kernels.hpp"

namespace nmk {

enum class Units { Normalized, Absolute };

// A model document after unit resolution. `system` is always normalized to
// omega_a = 1; `omega_a_abs` is the absolute frequency [rad/s] used for the
// conversion (1 for normalized input).
struct ModelConfig {
  SystemParams system;
  Units units = Units::Normalized;
  double omega_a_abs = 1.0;
  nlohmann::json source;

  // Conversions of user-facing quantities into the normalized frame.
  double frequency_in(double v) const { return v / omega_a_abs; }
  double time_in(double v) const { return v * omega_a_abs; }
  double flux_in(double v) const { return v / omega_a_abs; }
};

// Parses {"model": "fw"|"markov"|"fano", ..., "background", "units", "omega_a", "beta"}.
// `units_override` (from the command line) wins over the document's "units".
ModelConfig parse_model(const nlohmann::json& doc, const std::string& units_override = "");
ModelConfig load_model(const std::string& path, const std::string& units_override = "");

// Normalized model as a JSON document, for manifests.
nlohmann::json describe(const SystemParams& system);

constexpr double kSpeedOfLight = 299792458.0;  // m/s

}  // namespace nmk
