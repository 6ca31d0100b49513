#include "nmkerr/config.hpp"

#include <fstream>
#include <optional>

#include "nmkerr/errors.hpp"

namespace nmk {

namespace {

using nlohmann::json;

double get_number(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ConfigError(std::string("model: missing field '") + key + "'");
  if (!doc.at(key).is_number())
    throw ConfigError(std::string("model: field '") + key + "' must be a number");
  return doc.at(key).get<double>();
}

std::optional<double> opt_number(const json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  return get_number(doc, key);
}

}  // namespace

ModelConfig parse_model(const json& doc, const std::string& units_override) {
  if (!doc.is_object()) throw ConfigError("model: document must be a JSON object");
  ModelConfig cfg;
  cfg.source = doc;

  std::string units = units_override;
  if (units.empty()) units = doc.value("units", std::string("normalized"));
  if (units == "normalized") {
    cfg.units = Units::Normalized;
  } else if (units == "absolute") {
    cfg.units = Units::Absolute;
  } else {
    throw ConfigError("model: units must be 'absolute' or 'normalized', got '" + units + "'");
  }

  if (cfg.units == Units::Absolute) {
    cfg.omega_a_abs = get_number(doc, "omega_a");
    if (!(cfg.omega_a_abs > 0.0)) throw ConfigError("model: omega_a must be > 0");
  } else if (auto wa = opt_number(doc, "omega_a"); wa && *wa != 1.0) {
    throw ConfigError("model: normalized units require omega_a = 1 (or omit it)");
  }
  const double s = cfg.omega_a_abs;

  if (!doc.contains("model") || !doc.at("model").is_string())
    throw ConfigError("model: missing string field 'model'");
  const std::string kind = doc.at("model").get<std::string>();

  KernelModel k = KernelModel::markovian(0.0);
  if (kind == "markov" || kind == "markovian") {
    k = KernelModel::markovian(get_number(doc, "gamma") / s);
  } else if (kind == "fw") {
    k = KernelModel::friedrich_wintgen(get_number(doc, "kappa") / s, get_number(doc, "gamma") / s,
                                       get_number(doc, "omega_d") / s);
  } else if (kind == "fano") {
    double T = 0.0;
    if (auto t = opt_number(doc, "T")) {
      T = *t * s;
    } else if (auto L = opt_number(doc, "L")) {
      if (cfg.units != Units::Absolute)
        throw ConfigError("model: cavity length 'L' requires absolute units");
      T = 2.0 * *L / kSpeedOfLight * s;
    } else {
      throw ConfigError("model: fano requires 'T' or 'L'");
    }
    const double sig = get_number(doc, "sigma");
    if (sig != 1.0 && sig != -1.0) throw ConfigError("model: sigma must be +1 or -1");
    k = KernelModel::fano_mirror(get_number(doc, "kappa") / s, get_number(doc, "r_d"),
                                 get_number(doc, "t_d"), static_cast<int>(sig), T,
                                 opt_number(doc, "theta1"), opt_number(doc, "theta2"));
  } else {
    throw ConfigError("model: unknown model '" + kind + "' (expected fw, markov or fano)");
  }
  if (auto bg = opt_number(doc, "background"); bg && *bg != 0.0) k = k.with_background(*bg / s);

  cfg.system.omega_a = 1.0;
  cfg.system.beta = opt_number(doc, "beta").value_or(0.0) / s;
  cfg.system.kernel = k;
  cfg.system.validate();
  return cfg;
}

ModelConfig load_model(const std::string& path, const std::string& units_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("model file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_model(doc, units_override);
}

json describe(const SystemParams& system) {
  json j;
  j["units"] = "normalized";
  j["omega_a"] = system.omega_a;
  j["beta"] = system.beta;
  const KernelModel& k = system.kernel;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Markovian>) {
          j["model"] = "markov";
          j["gamma"] = m.gamma;
        } else if constexpr (std::is_same_v<T, FriedrichWintgen>) {
          j["model"] = "fw";
          j["kappa"] = m.kappa;
          j["gamma"] = m.gamma;
          j["omega_d"] = m.omega_d;
        } else {
          j["model"] = "fano";
          j["kappa"] = m.kappa;
          j["r_d"] = m.r_d;
          j["t_d"] = m.t_d;
          j["sigma"] = m.sigma;
          j["T"] = m.round_trip;
          j["theta1"] = m.theta1;
          j["theta2"] = m.theta2;
        }
      },
      k.core());
  j["background"] = k.background();
  return j;
}

}  // namespace nmk
