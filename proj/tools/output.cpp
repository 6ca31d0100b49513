#include "output.hpp"

#include <cmath>
#include <cstdio>

#include "nmkerr/errors.hpp"

#ifndef NMKERR_VERSION
#define NMKERR_VERSION "0.0.0"
#endif

namespace cli {

const nmk::SystemParams& Context::system() const {
  if (!model) throw nmk::ConfigError("--model is required for this command");
  return model->system;
}

fs::path Context::file(const std::string& name) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out))
    throw nmk::ConfigError("output directory not writable: " + out.string());
  outputs.push_back(name);
  return out / name;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Csv::Csv(const fs::path& path, const std::vector<Column>& columns)
    : os_(path), width_(columns.size()) {
  if (!os_) throw nmk::ConfigError("cannot write " + path.string());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) os_ << ',';
    os_ << columns[i].name << " [" << columns[i].unit << ']';
  }
  os_ << '\n';
}

void Csv::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < width_; ++i) {
    if (i) os_ << ',';
    if (i < cells.size()) os_ << cells[i];
  }
  os_ << '\n';
}

void write_manifest(Context& ctx, const std::string& command, double wall_seconds) {
  nlohmann::json m;
  m["tool"] = "nmkerr";
  m["version"] = NMKERR_VERSION;
  m["command"] = command;
  m["parameters"] = ctx.params;
  m["threads"] = ctx.threads;
  m["seed"] = ctx.seed;
  m["units"] = ctx.absolute() ? "absolute" : "normalized";
  if (ctx.model) {
    m["model"] = nmk::describe(ctx.model->system);
    m["omega_a_abs"] = ctx.model->omega_a_abs;
  }
  m["outputs"] = ctx.outputs;
  m["wall_time_s"] = wall_seconds;
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  std::ofstream os(ctx.out / "manifest.json");
  os << m.dump(2) << '\n';
}

}  // namespace cli
