#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "nmkerr/errors.hpp"

namespace {

int fail(const std::string& error, const std::string& kind, const std::string& message, int code) {
  nlohmann::json j{{"error", error}, {"message", message}, {"exit_code", code}};
  if (!kind.empty()) j["kind"] = kind;
  std::cerr << j.dump() << std::endl;
  return code;
}

void record(nlohmann::json& params, const CLI::App* sub) {
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    std::string key = opt->get_name();
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    const auto& res = opt->results();
    params[key] = res.size() == 1 ? nlohmann::json(res.front()) : nlohmann::json(res);
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cli;
  CLI::App app{"Kerr cavities with frequency-dependent loss: steady states, noise, stability, "
               "dynamics"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string model_path, units, out = ".";
  Context ctx;
  app.add_option("--model", model_path, "model JSON document");
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_flag("--plot", ctx.plot, "also write SVG plots");
  app.add_option("--threads", ctx.threads, "worker threads (0 = hardware concurrency)");
  app.add_option("--units", units, "normalized or absolute; overrides the model document")
      ->check(CLI::IsMember({"normalized", "absolute"}));
  app.add_option("--seed", ctx.seed, "seed for the initial perturbation of transients");

  KernelScanArgs ks;
  auto* c_ks = app.add_subcommand("kernel-scan", "tabulate K_l and K_c");
  c_ks->add_option("--from", ks.from, "lowest frequency");
  c_ks->add_option("--to", ks.to, "highest frequency");
  c_ks->add_option("--points", ks.points)->capture_default_str();

  SweepArgs sw;
  auto* c_sw = app.add_subcommand("sweep", "steady-state photon numbers against pump flux");
  c_sw->add_option("--omega-p", sw.omega_p, "pump frequency")->required();
  c_sw->add_option("--flux-max", sw.flux_max, "largest flux (default: past the bistable range)");
  c_sw->add_option("--points", sw.points)->capture_default_str();
  c_sw->add_flag("--log", sw.log, "logarithmic flux grid");

  NoiseArgs nz;
  bool no_exact = false;
  auto* c_nz = app.add_subcommand("noise", "quadrature variances along a branch");
  c_nz->add_option("--omega-p", nz.omega_p, "pump frequency")->required();
  c_nz->add_option("--n", nz.n, "single photon number (errors are fatal)");
  c_nz->add_option("--n-min", nz.n_min)->capture_default_str();
  c_nz->add_option("--n-max", nz.n_max)->capture_default_str();
  c_nz->add_option("--points", nz.points)->capture_default_str();
  c_nz->add_flag("--linear", nz.linear, "linear photon-number grid");
  c_nz->add_flag("--adiabatic-only", no_exact, "skip the exact integrals");

  SpectrumArgs sp;
  auto* c_sp = app.add_subcommand("noise-spectrum", "sideband noise spectra at one point");
  c_sp->add_option("--omega-p", sp.omega_p, "pump frequency")->required();
  c_sp->add_option("--n", sp.n, "photon number")->required();
  c_sp->add_option("--omega-max", sp.omega_max, "largest sideband frequency");
  c_sp->add_option("--points", sp.points)->capture_default_str();

  PhaseArgs ph;
  auto* c_ph = app.add_subcommand("phase-diagram", "stability classes over pump and photon number");
  c_ph->add_option("--omega-p-min", ph.w_min)->capture_default_str();
  c_ph->add_option("--omega-p-max", ph.w_max)->capture_default_str();
  c_ph->add_option("--n-min", ph.n_min)->capture_default_str();
  c_ph->add_option("--n-max", ph.n_max)->capture_default_str();
  c_ph->add_option("--nw", ph.nw, "pump grid size")->capture_default_str();
  c_ph->add_option("--nn", ph.nn, "photon-number grid size")->capture_default_str();
  c_ph->add_flag("--linear-n", ph.linear_n, "linear photon-number grid");

  TransientArgs tr;
  auto add_transient = [&](CLI::App* c) {
    c->add_option("--omega-p", tr.omega_p, "pump frequency")->required();
    c->add_option("--n", tr.n, "start next to the steady state with this photon number");
    c->add_option("--flux", tr.flux, "drive with this flux from the vacuum");
    c->add_option("--t-end", tr.t_end, "duration");
    c->add_option("--dt", tr.dt, "integration step");
    c->add_option("--method", tr.method)
        ->check(CLI::IsMember({"auto", "two-mode", "split-step"}))
        ->capture_default_str();
    c->add_option("--kick", tr.kick, "relative perturbation of the start")->capture_default_str();
    c->add_option("--samples", tr.samples, "stored samples")->capture_default_str();
  };
  auto* c_tr = app.add_subcommand("transient", "mean-field time evolution");
  add_transient(c_tr);
  auto* c_dg = app.add_subcommand("diagnose", "transient plus pulsing diagnostics");
  add_transient(c_dg);
  c_dg->add_option("--window", tr.window, "analysed tail fraction")->capture_default_str();

  auto* c_va = app.add_subcommand("validate", "kernel and model consistency checks");

  std::string preset;
  auto* c_re = app.add_subcommand("reproduce", "run a named figure preset");
  c_re->add_option("preset", preset, "preset name")
      ->required()
      ->check(CLI::IsMember(preset_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("config_error", "usage", e.what(), 2);
  }

  const auto t0 = std::chrono::steady_clock::now();
  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  ctx.out = out;
  record(ctx.params, sub);
  try {
    if (!model_path.empty()) {
      ctx.model = nmk::load_model(model_path, units);
      ctx.params["model_path"] = model_path;
    }
    bool ok = true;
    if (sub == c_ks) kernel_scan(ctx, ks);
    else if (sub == c_sw) sweep(ctx, sw);
    else if (sub == c_nz) {
      nz.exact = !no_exact;
      noise(ctx, nz);
    } else if (sub == c_sp) noise_spectrum(ctx, sp);
    else if (sub == c_ph) phase_diagram(ctx, ph);
    else if (sub == c_tr) transient(ctx, tr);
    else if (sub == c_dg) diagnose(ctx, tr);
    else if (sub == c_va) ok = validate(ctx);
    else if (sub == c_re) reproduce(ctx, preset);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(ctx, command, wall);
    if (!ok) return fail("numerical_error", "validation", "one or more checks failed", 3);
    return 0;
  } catch (const nmk::ConfigError& e) {
    return fail("config_error", "", e.what(), 2);
  } catch (const nmk::NumericalError& e) {
    return fail("numerical_error", e.kind(), e.what(), 3);
  } catch (const std::exception& e) {
    return fail("numerical_error", "internal", e.what(), 3);
  }
}
