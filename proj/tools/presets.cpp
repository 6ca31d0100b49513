#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "commands.hpp"
#include "nmkerr/errors.hpp"

namespace cli {

using nlohmann::json;

namespace {

// Round trip of a 5 um cavity at omega_a = 1.03e15 rad/s, in units of 1/omega_a.
double fano_round_trip() { return 1.03e15 * 2.0 * 5e-6 / nmk::kSpeedOfLight; }

json fw_doc(double kappa, double gamma, double omega_d, double beta) {
  return {{"model", "fw"}, {"kappa", kappa}, {"gamma", gamma}, {"omega_d", omega_d},
          {"beta", beta}};
}

json fano_doc(double r_d, int sigma) {
  return {{"model", "fano"}, {"kappa", 1e-4},  {"r_d", r_d},
          {"t_d", std::sqrt(1.0 - r_d * r_d)}, {"sigma", sigma},
          {"T", fano_round_trip()}, {"beta", 1e-4}};
}

json fig2_doc() { return fw_doc(1e-4, 1e-2, 1.01, 1e-10); }

void use(Context& ctx, const std::string& label, const json& doc) {
  ctx.model = nmk::parse_model(doc, "normalized");
  ctx.params["models"][label] = doc;
}

std::string tag(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4f", v);
  return b;
}

void transient_preset(Context& ctx, double n, double t_end) {
  use(ctx, "fw", fig2_doc());
  TransientArgs t;
  t.omega_p = 1.02;
  t.n = n;
  t.t_end = t_end;
  t.samples = 40000;
  diagnose(ctx, t);
}

const std::map<std::string, std::function<void(Context&)>>& presets() {
  static const std::map<std::string, std::function<void(Context&)>> table{
      {"fig2c",
       [](Context& ctx) {
         use(ctx, "markovian", {{"model", "markov"}, {"gamma", 1e-4}, {"beta", 1e-10}});
         for (double wp : {1.005, 1.012, 1.02, 1.03})
           sweep(ctx, {wp, std::nullopt, 400, true, "sweep_markov_wp" + tag(wp)});
         use(ctx, "fw", fig2_doc());
         kernel_scan(ctx, {0.97, 1.05, 2001, "kernel"});
         for (double wp : {1.005, 1.012, 1.02, 1.03})
           sweep(ctx, {wp, std::nullopt, 400, true, "sweep_fw_wp" + tag(wp)});
       }},
      {"fig2d",
       [](Context& ctx) {
         use(ctx, "fw", fig2_doc());
         phase_diagram(ctx, {0.995, 1.035, 1e6, 3e8, 200, 200, false, "phase_diagram"});
       }},
      {"fig2e", [](Context& ctx) { transient_preset(ctx, 1.5e7, 3e5); }},
      {"fig2f", [](Context& ctx) { transient_preset(ctx, 3.7e7, 4e6); }},
      {"fig2g", [](Context& ctx) { transient_preset(ctx, 5e8, 4e5); }},
      {"fig3a",
       [](Context& ctx) {
         use(ctx, "fw", fig2_doc());
         NoiseArgs a;
         a.omega_p = 1.02;
         a.n_min = 1e6;
         a.n_max = 3e8;
         a.points = 150;
         noise(ctx, a);
       }},
      {"fig3b",
       [](Context& ctx) {
         use(ctx, "fw", fig2_doc());
         noise_map(ctx, {0.995, 1.035, 1e6, 3e8, 120, 120, false, "noise_map"});
       }},
      {"si_fig1",
       [](Context& ctx) {
         use(ctx, "fw", fig2_doc());
         kernel_scan(ctx, {0.99, 1.04, 2001, "kernel"});
         for (double wp : {1.0102, 1.011, 1.015, 1.02}) {
           NoiseArgs a;
           a.omega_p = wp;
           a.n_min = 1e6;
           a.n_max = 3e8;
           a.points = 100;
           a.stem = "noise_wp" + tag(wp);
           noise(ctx, a);
         }
       }},
      {"si_fig2",
       [](Context& ctx) {
         use(ctx, "fw", fw_doc(1e-4, 1e-2, 1.004, 1e-4));
         kernel_scan(ctx, {0.98, 1.03, 2001, "kernel"});
         sweep(ctx, {1.0042, std::nullopt, 400, true, "sweep"});
         NoiseArgs a;
         a.omega_p = 1.0042;
         a.n_min = 1.0;
         a.n_max = 200.0;
         a.points = 120;
         noise(ctx, a);
         // The sub-Poissonian dip sits just above the lower end of the upper branch.
         a.n_min = 41.9;
         a.n_max = 43.0;
         a.points = 111;
         a.linear = true;
         a.stem = "noise_fine";
         noise(ctx, a);
       }},
      {"si_fig3",
       [](Context& ctx) {
         // Comb kernels are treated in the adiabatic picture.
         use(ctx, "fano", fano_doc(-0.999, 1));
         kernel_scan(ctx, {0.99, 1.03, 4001, "kernel"});
         sweep(ctx, {1.0072, std::nullopt, 400, true, "sweep"});
         NoiseArgs a;
         a.omega_p = 1.0072;
         a.n_min = 1.0;
         a.n_max = 200.0;
         a.points = 400;
         a.exact = false;
         noise(ctx, a);
       }},
      {"si_fig4",
       [](Context& ctx) {
         use(ctx, "fw", fig2_doc());
         eigenvalue_scan(ctx, 1.02, 1e6, 3e8, 400, "eigenvalues");
         phase_diagram(ctx, {0.995, 1.035, 1e6, 3e8, 200, 200, false, "mi_gain"});
       }},
      {"fig4b",
       [](Context& ctx) {
         use(ctx, "fano", fano_doc(0.0, 1));
         kernel_scan(ctx, {0.9, 1.2, 4001, "kernel"});
         phase_diagram(ctx, {1.0, 1.1, 1.0, 1e3, 150, 150, false, "phase_diagram"});
       }},
      {"fig4c",
       [](Context& ctx) {
         use(ctx, "fano", fano_doc(-0.6, 1));
         kernel_scan(ctx, {0.9, 1.2, 4001, "kernel"});
         phase_diagram(ctx, {0.98, 1.08, 1.0, 1e3, 150, 150, false, "phase_diagram"});
       }},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : presets()) out.push_back(k);
  return out;
}

void reproduce(Context& ctx, const std::string& preset) {
  const auto it = presets().find(preset);
  if (it == presets().end()) throw nmk::ConfigError("unknown preset '" + preset + "'");
  ctx.out /= preset;
  ctx.params["preset"] = preset;
  it->second(ctx);
}

}  // namespace cli
