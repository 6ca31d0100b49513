#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nmkerr/dynamics.hpp"
#include "nmkerr/errors.hpp"

using namespace nmk;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I{0.0, 1.0};

SystemParams fig2() { return {1.0, 1e-10, KernelModel::friedrich_wintgen(1e-4, 1e-2, 1.01)}; }

Trajectory synthetic(double freq, double swing, double decay, double t_end, double dt) {
  Trajectory tr;
  tr.dt = dt;
  for (double t = 0.0; t <= t_end; t += dt) {
    tr.t.push_back(t);
    tr.n.push_back(1e6 * (1.0 + 0.5 * swing * std::exp(-decay * t) * std::sin(freq * t)));
    tr.alpha.push_back(std::sqrt(tr.n.back()));
  }
  return tr;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("partitioned convolution equals the direct sum") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> N(0.0, 1.0);
  for (std::size_t taps : {1u, 15u, 16u, 17u, 100u, 1000u, 3001u}) {
    for (std::size_t block : {0u, 16u, 64u}) {
      std::vector<cplx> h(taps), x(5000);
      for (auto& v : h) v = {N(rng), N(rng)};
      for (auto& v : x) v = {N(rng), N(rng)};
      CausalConvolver conv(h, block);
      double worst = 0.0;
      for (std::size_t m = 0; m < x.size(); ++m) {
        const cplx y = conv.push(x[m]);
        cplx ref = 0.0;
        for (std::size_t j = 0; j < taps && j <= m; ++j) ref += h[j] * x[m - j];
        worst = std::max(worst, std::abs(y - ref) / std::sqrt(static_cast<double>(taps)));
      }
      CHECK(worst < 1e-11);
    }
  }
}

TEST_CASE("rk4 converges at fourth order") {
  const auto s = fig2();
  const double wp = 1.02, n = 1.5e7;
  const auto fp = two_mode_fixed_point(s, wp, n);
  SimOptions o;
  o.pump_phase = fp.pump_phase;
  o.expected_n = n;
  const Drive d{wp, fp.flux};
  const TwoModeInitial init{fp.state.alpha * 1.2, fp.state.d};
  const double T = 2000.0;
  const auto ref = simulate_two_mode(s, d, T, 0.125, init, o);
  const auto a = simulate_two_mode(s, d, T, 2.0, init, o);
  const auto b = simulate_two_mode(s, d, T, 1.0, init, o);
  const double ea = std::abs(a.alpha.back() - ref.alpha.back());
  const double eb = std::abs(b.alpha.back() - ref.alpha.back());
  CHECK(ea / eb == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("fixed point is stationary") {
  const auto s = fig2();
  const auto fp = two_mode_fixed_point(s, 1.02, 1.5e7);
  SimOptions o;
  o.pump_phase = fp.pump_phase;
  const auto tr = simulate_two_mode(s, {1.02, fp.flux}, 5000.0, 1.0, fp.state, o);
  for (double v : tr.n) CHECK(v == doctest::Approx(1.5e7).epsilon(1e-9));
}

TEST_CASE("energy decays without a drive") {
  const auto s = fig2();
  SimOptions o;
  o.expected_n = 1e7;
  const auto tr = simulate_two_mode(s, {1.0, 0.0}, 20000.0, 1.0, {cplx(3e3, 1e3), cplx(-2e3, 0.0)}, o);
  double prev = 1e300;
  for (std::size_t i = 0; i < tr.n.size(); ++i) {
    const double e = tr.n[i] + std::norm(tr.d[i]);
    CHECK(e <= prev * (1.0 + 1e-12));
    prev = e;
  }
}

TEST_CASE("split step is exact for a driven linear flat-loss cavity") {
  const double g = 1e-3, wp = 1.0004, flux = 50.0;
  SystemParams s{1.0, 0.0, KernelModel::markovian(g)};
  const cplx a0(2.0, -1.0);
  const auto tr = simulate_split_step(s, {wp, flux}, 4000.0, 0.7, a0);
  // a' = -(g + i wap) a + sqrt(2 g) s0
  const cplx z = g + I * (1.0 - wp);
  const cplx ass = std::sqrt(2 * g * flux) / z;
  for (std::size_t i = 0; i < tr.t.size(); i += 97) {
    const cplx ref = ass + (a0 - ass) * std::exp(-z * tr.t[i]);
    CHECK(std::abs(tr.alpha[i] - ref) <= 1e-10 * std::abs(ass));
  }
}

TEST_CASE("split step reproduces the two-mode model") {
  const auto s = fig2();
  const double wp = 1.0226, n = 3.9e7;
  const auto fp = two_mode_fixed_point(s, wp, n);
  SimOptions o;
  o.pump_phase = fp.pump_phase;
  o.expected_n = n;
  const cplx a0 = fp.state.alpha * 1.05;
  const auto a = simulate_two_mode(s, {wp, fp.flux}, 2e4, 0.25, {a0, 0.0}, o);
  const auto b = simulate_split_step(s, {wp, fp.flux}, 2e4, 0.25, a0, o);
  REQUIRE(a.n.size() == b.n.size());
  double peak = 0.0, err = 0.0;
  for (std::size_t i = 0; i < a.n.size(); ++i) {
    peak = std::max(peak, a.n[i]);
    err = std::max(err, std::abs(a.n[i] - b.n[i]));
  }
  CHECK(err / peak < 1e-3);
}

TEST_CASE("split step snaps the step to the round trip") {
  const double T = 1.03e15 * 2.0 * 5e-6 / 299792458.0;
  SystemParams s{1.0, 1e-4, KernelModel::fano_mirror(1e-4, -0.8, 0.6, 1, T)};
  const double mem = s.kernel.memory_time();
  SimOptions o;
  o.expected_n = 1.0;
  const auto tr = simulate_split_step(s, {1.0, 0.0}, 10.5 * mem, 1.0, 1.0, o);
  CHECK(tr.dt == doctest::Approx(T / 64.0));
  CHECK_THROWS_AS(simulate_split_step(s, {1.0, 0.0}, 5.0 * mem, 0.1, 1.0, o), ConfigError);
}

TEST_CASE("two-mode step-size guard") {
  const auto s = fig2();
  SimOptions o;
  o.expected_n = 1e7;
  CHECK_THROWS_AS(simulate_two_mode(s, {1.02, 1e3}, 100.0, 10.0, {0.0, 0.0}, o), ConfigError);
}

TEST_CASE("pulsing diagnostics on synthetic signals") {
  SUBCASE("sustained") {
    const auto tr = synthetic(0.01, 0.8, 0.0, 3e4, 1.0);
    const auto d = diagnose_pulsing(tr, 0.5);
    CHECK(d.is_pulsing);
    CHECK(d.dominant_freq == doctest::Approx(0.01).epsilon(0.01));
    CHECK(d.swing_fraction == doctest::Approx(0.8).epsilon(0.01));
    CHECK(std::abs(d.decay_rate) < 1e-6);
  }
  SUBCASE("damped") {
    const auto tr = synthetic(0.02, 0.5, 2e-4, 3e4, 1.0);
    const auto d = diagnose_pulsing(tr, 0.5);
    CHECK(!d.is_pulsing);
    CHECK(d.decay_rate == doctest::Approx(2e-4).epsilon(0.05));
  }
  SUBCASE("too few periods") {
    const auto tr = synthetic(2 * kPi / 5000.0, 0.5, 0.0, 3e4, 1.0);
    CHECK_THROWS_AS(diagnose_pulsing(tr, 0.5), ConfigError);
  }
}

}  // TEST_SUITE
