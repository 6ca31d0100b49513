#include <doctest.h>

#include <cmath>
#include <fstream>

#include "nmkerr/config.hpp"
#include "nmkerr/errors.hpp"

using namespace nmk;
using nlohmann::json;

TEST_SUITE("config") {

TEST_CASE("normalized fw model") {
  const auto cfg = parse_model(json::parse(
      R"({"model": "fw", "kappa": 1e-4, "gamma": 1e-2, "omega_d": 1.01, "beta": 1e-10})"));
  CHECK(cfg.units == Units::Normalized);
  CHECK(cfg.system.beta == 1e-10);
  REQUIRE(cfg.system.kernel.is<FriedrichWintgen>());
  CHECK(cfg.system.kernel.as<FriedrichWintgen>().omega_d == 1.01);
}

TEST_CASE("absolute units are normalized by omega_a") {
  const double wa = 1.03e15;
  const auto cfg = parse_model(json{{"model", "fano"},
                                    {"units", "absolute"},
                                    {"omega_a", wa},
                                    {"kappa", 1e-4 * wa},
                                    {"beta", 1e-4 * wa},
                                    {"r_d", -0.8},
                                    {"t_d", 0.6},
                                    {"sigma", 1},
                                    {"L", 5e-6},
                                    {"background", 1e-6 * wa}});
  CHECK(cfg.system.beta == doctest::Approx(1e-4));
  const auto& f = cfg.system.kernel.as<FanoMirror>();
  CHECK(f.kappa == doctest::Approx(1e-4));
  CHECK(f.round_trip == doctest::Approx(2 * 5e-6 / kSpeedOfLight * wa));
  CHECK(cfg.system.kernel.background() == doctest::Approx(1e-6));
  CHECK(cfg.frequency_in(wa) == doctest::Approx(1.0));
  CHECK(cfg.time_in(1.0 / wa) == doctest::Approx(1.0));
}

TEST_CASE("command-line units override the document") {
  const json doc{{"model", "markov"}, {"gamma", 2e12}, {"omega_a", 1e15}, {"units", "normalized"}};
  const auto cfg = parse_model(doc, "absolute");
  CHECK(cfg.system.kernel.as<Markovian>().gamma == doctest::Approx(2e-3));
}

TEST_CASE("malformed documents") {
  CHECK_THROWS_AS(parse_model(json::array()), ConfigError);
  CHECK_THROWS_AS(parse_model(json{{"model", "lorentz"}}), ConfigError);
  CHECK_THROWS_AS(parse_model(json{{"model", "fw"}, {"kappa", 1e-4}, {"gamma", 1e-2}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_model(json{{"model", "markov"}, {"gamma", "fast"}}), ConfigError);
  CHECK_THROWS_AS(parse_model(json{{"model", "markov"}, {"gamma", 1e-3}, {"units", "si"}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_model(json{{"model", "markov"}, {"gamma", 1e-3}, {"omega_a", 2.0}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_model(json{{"model", "fano"},
                                   {"kappa", 1e-4},
                                   {"r_d", 0.6},
                                   {"t_d", 0.8},
                                   {"sigma", 1},
                                   {"L", 5e-6}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_model(json{{"model", "fano"},
                                   {"kappa", 1e-4},
                                   {"r_d", 0.6},
                                   {"t_d", 0.8},
                                   {"sigma", 2},
                                   {"T", 30.0}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_model(json{{"model", "markov"}, {"gamma", 1e-3}, {"beta", -1.0}}),
                  ConfigError);
}

TEST_CASE("describe round trips") {
  const auto cfg = parse_model(json::parse(
      R"({"model": "fano", "kappa": 1e-4, "r_d": -0.8, "t_d": 0.6, "sigma": -1, "T": 34.0,
          "beta": 1e-4, "background": 2e-6})"));
  const auto again = parse_model(describe(cfg.system));
  const auto& a = cfg.system.kernel.as<FanoMirror>();
  const auto& b = again.system.kernel.as<FanoMirror>();
  CHECK(a.theta1 == b.theta1);
  CHECK(a.theta2 == b.theta2);
  CHECK(again.system.kernel.background() == cfg.system.kernel.background());
  CHECK(again.system.beta == cfg.system.beta);
}

TEST_CASE("load_model reports missing and invalid files") {
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ConfigError);
  const std::string path = "config_test_invalid.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_model(path), ConfigError);
  std::remove(path.c_str());
}

}  // TEST_SUITE
