#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spincount/fit.hpp"
#include "spincount/rng.hpp"
#include "spincount/units.hpp"

using namespace spincount;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

TEST_CASE("noiseless lorentzian is recovered exactly") {
  const auto x = linspace(0.418, 0.421, 61);
  const std::vector<double> p{0.4196, 0.45e-3, 3.0, 0.2};
  std::vector<double> y;
  for (double xi : x) y.push_back(lorentzian(xi, p));
  const auto f = fit_lorentzian_peak(x, y);
  CHECK(f.converged);
  CHECK(f.param("center") == doctest::Approx(p[0]).epsilon(1e-9));
  CHECK(f.param("fwhm") == doctest::Approx(p[1]).epsilon(1e-6));
  CHECK(f.param("amplitude") == doctest::Approx(p[2]).epsilon(1e-6));
  CHECK(f.param("offset") == doctest::Approx(p[3]).epsilon(1e-6));
  CHECK_THROWS(f.param("width"));
}

TEST_CASE("flat spectrum does not produce a confident peak") {
  const auto x = linspace(0.418, 0.421, 61);
  CounterRng rng(1, 0, 0, StreamId::kSpinDynamics);
  std::vector<double> y, s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y.push_back(1.0 + 0.05 * rng.gaussian());
    s.push_back(0.05);
  }
  const auto f = fit_lorentzian_peak(x, y, s);
  const bool confident = f.converged && f.param("amplitude") > 5 * f.error("amplitude") &&
                         f.param("fwhm") < (x.back() - x.front());
  CHECK_FALSE(confident);
}

TEST_CASE("noiseless decay models are recovered") {
  const auto t = linspace(0.0, 400e-6, 41);
  struct Case {
    DecayModel model;
    std::vector<double> p;
  };
  const std::vector<Case> cases{
      {DecayModel::kExponential, {0.8, 120e-6, 0.1}},
      {DecayModel::kGaussianDampedSine, {0.45, 170e-6, 25e3, 0.0, 0.5}},
      {DecayModel::kExpDampedSine, {0.4, 150e-6, 20e3, 0.3, 0.5}},
      {DecayModel::kSinePlusLinear, {0.3, 12e3, 0.4, 0.2, 500.0}},
  };
  for (const auto& c : cases) {
    std::vector<double> y;
    for (double ti : t) y.push_back(decay_model(c.model, ti, c.p));
    const auto f = fit_decay(t, y, c.model);
    CAPTURE(to_string(c.model));
    CHECK(f.converged);
    CHECK(f.chi2 < 1e-12);
    for (std::size_t i = 0; i < c.p.size(); ++i) {
      if (c.model == DecayModel::kSinePlusLinear && i == 2) {
        CHECK(std::remainder(f[i] - c.p[i], 2 * constants::kPi) == doctest::Approx(0.0).scale(1.0));
      } else if (c.model != DecayModel::kSinePlusLinear && i == 3) {
        CHECK(std::remainder(f[i] - c.p[i], 2 * constants::kPi) == doctest::Approx(0.0).scale(1.0));
      } else {
        CHECK(f[i] == doctest::Approx(c.p[i]).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("dominant frequency") {
  const auto t = linspace(0.0, 1e-3, 101);
  std::vector<double> y;
  for (double ti : t) y.push_back(std::cos(2 * constants::kPi * 7e3 * ti) + 3.0);
  CHECK(dominant_frequency(t, y) == doctest::Approx(7e3).epsilon(0.02));
}

TEST_CASE("purcell detuning fit recovers g0") {
  const double g0 = constants::kTwoPi * 3.54e3;
  const double kappa = constants::kTwoPi * 470e3;
  const std::vector<double> d{-kappa / 2, -kappa / 4, 0.0, kappa / 4, kappa / 2};
  CounterRng rng(6, 0, 0, StreamId::kSpinDynamics);
  std::vector<double> t1, s;
  for (double di : d) {
    const double v = 1.0 / oracle::purcell(g0, di, kappa);
    t1.push_back(v * (1.0 + 0.01 * rng.gaussian()));
    s.push_back(0.01 * v);
  }
  const auto fixed = fit_purcell_detuning(d, t1, s, kappa);
  CHECK(fixed.converged);
  CHECK(fixed.param("g0") == doctest::Approx(g0).epsilon(0.01));
  CHECK(fixed.param("kappa") == kappa);
  const auto free = fit_purcell_detuning(d, t1, s, 0.0);
  CHECK(free.param("kappa") == doctest::Approx(kappa).epsilon(0.05));
  CHECK(free.param("g0") == doctest::Approx(g0).epsilon(0.03));

  CHECK_THROWS_AS(fit_purcell_detuning({0.0, 1e5, 2e5}, {1e-3, 1e-3, 1e-3}, {}, kappa), std::invalid_argument);
  CHECK_THROWS_AS(fit_purcell_detuning({-1e5, 1e5}, {1e-3, 1e-3}, {}, 0.0), std::invalid_argument);
}

TEST_CASE("reported errors match the scatter of repeated fits") {
  const auto t = linspace(0.0, 5e-3, 50);
  CounterRng rng(7, 0, 0, StreamId::kSpinDynamics);
  const int runs = 100;
  std::vector<double> taus;
  double err = 0;
  for (int r = 0; r < runs; ++r) {
    std::vector<double> y, s;
    for (double ti : t) {
      y.push_back(2.0 * std::exp(-ti / 1.2e-3) + 0.3 + 0.05 * rng.gaussian());
      s.push_back(0.05);
    }
    const auto f = fit_decay(t, y, DecayModel::kExponential, s);
    REQUIRE(f.converged);
    taus.push_back(f.param("tau"));
    err += f.error("tau") / runs;
  }
  double m = 0, v = 0;
  for (double x : taus) m += x / runs;
  for (double x : taus) v += (x - m) * (x - m) / (runs - 1);
  const double scatter = std::sqrt(v);
  CHECK(m == doctest::Approx(1.2e-3).epsilon(0.01));
  CHECK(err / scatter > 1.0 / 1.5);
  CHECK(err / scatter < 1.5);
}

TEST_CASE("square-root law") {
  const std::vector<double> x{1, 2, 5, 10, 20, 40, 60};
  std::vector<double> y;
  for (double xi : x) y.push_back(1.9 * std::sqrt(xi));
  const auto f = fit_sqrt_law(x, y);
  CHECK(f.slope == doctest::Approx(1.9));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK_THROWS(fit_sqrt_law({1.0}, {1.0}));
}

TEST_CASE("least squares honours fixed parameters and rejects bad sigma") {
  const auto x = linspace(0, 1, 20);
  std::vector<double> y;
  for (double xi : x) y.push_back(2 * xi + 1);
  const ModelFn line = [](double xi, const std::vector<double>& p) { return p[0] * xi + p[1]; };
  const auto f = least_squares(line, x, y, {}, {1.0, 0.5}, {1.0, 1.0}, {false, true});
  CHECK(f[1] == 0.5);
  double sx = 0, sxx = 0;
  for (double xi : x) {
    sx += xi;
    sxx += xi * xi;
  }
  CHECK(f[0] == doctest::Approx(2.0 + 0.5 * sx / sxx).epsilon(1e-8));
  CHECK_THROWS(least_squares(line, x, y, std::vector<double>(20, 0.0), {1, 1}, {1, 1}));
}
