#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmkerr/config.hpp"

namespace cli {

namespace fs = std::filesystem;

// Everything a subcommand needs besides its own parameters.
struct Context {
  std::optional<nmk::ModelConfig> model;
  fs::path out = ".";
  bool plot = false;
  unsigned threads = 0;
  std::uint64_t seed = 1;
  std::vector<std::string> outputs;
  nlohmann::json params = nlohmann::json::object();

  const nmk::SystemParams& system() const;
  bool absolute() const { return model && model->units == nmk::Units::Absolute; }
  double wa() const { return model ? model->omega_a_abs : 1.0; }

  double f_in(double v) const { return v / wa(); }
  double f_out(double v) const { return v * wa(); }
  double t_in(double v) const { return v * wa(); }
  double t_out(double v) const { return v / wa(); }

  std::string f_unit() const { return absolute() ? "rad/s" : "omega_a"; }
  std::string t_unit() const { return absolute() ? "s" : "1/omega_a"; }
  std::string flux_unit() const { return absolute() ? "photons/s" : "photons*omega_a"; }

  // Path inside the output directory; the directory is created on first use.
  fs::path file(const std::string& name);
};

std::string num(double v);

struct Column {
  std::string name;
  std::string unit;
};

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<Column>& columns);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream os_;
  std::size_t width_;
};

void write_manifest(Context& ctx, const std::string& command, double wall_seconds);

}  // namespace cli
