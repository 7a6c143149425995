#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "spincount/ensemble.hpp"
#include "spincount/experiments.hpp"
#include "spincount/rng.hpp"

using namespace spincount;

namespace {

SpinCenter coupled_spin(const ExperimentConfig& c, double gamma_r, std::uint32_t id = 0) {
  SpinCenter s;
  s.id = id;
  const double g0 = std::sqrt(gamma_r * c.resonator.kappa() / 4.0);
  s.position = {0.0, distance_for_coupling(c.resonator, s.tensor.gamma_perp, g0), 0.0};
  s.gamma_nr = nonradiative_rate(c.nonradiative, tuned_field(c, s).b0, c.resonator.omega0);
  return s;
}

}  // namespace

TEST_CASE("tuned field puts the spin at the requested detuning") {
  ExperimentConfig c;
  SpinCenter s;
  s.tensor.axis_tilt = {1e-3, -2e-3};
  for (double d : {-1e6, 0.0, 2.5e5}) {
    const auto f = tuned_field(c, s, d);
    CHECK(spin_frequency(s.tensor, f) == doctest::Approx(c.resonator.omega0 + d).epsilon(1e-12));
    CHECK(f.theta == c.field.theta);
  }
}

TEST_CASE("replicated emitters share their coupling") {
  ExperimentConfig c;
  const SpinCenter s = coupled_spin(c, 700.0, 3);
  const auto copies = replicate_emitter(s, 5);
  REQUIRE(copies.size() == 5);
  CHECK(copies[0] == s);
  std::vector<std::uint32_t> ids;
  for (const auto& k : copies) {
    CHECK(k.position.y >= 0.0);
    CHECK(coupling_strength(k, c.resonator) == doctest::Approx(coupling_strength(s, c.resonator)));
    ids.push_back(k.id);
  }
  std::sort(ids.begin(), ids.end());
  CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
  CHECK(replicate_emitter(s, 0).empty());
}

TEST_CASE("spin summary at resonance") {
  ExperimentConfig c;
  const SpinCenter s = coupled_spin(c, 700.0);
  const auto sum = summarize_spin(c, s);
  CHECK(sum.rates.gamma_r == doctest::Approx(700.0));
  CHECK(sum.rates.detuning == doctest::Approx(0.0).scale(1.0));
  CHECK(sum.efficiency.eta_total ==
        doctest::Approx(sum.efficiency.branching * c.resonator.kappa_c / c.resonator.kappa() *
                        c.detector.eta_loss * c.detector.eta_smpd));
  CHECK(s.gamma_nr == doctest::Approx(3.3).epsilon(0.05));
}

TEST_CASE("zero drive amplitude gives a flat Rabi scan") {
  ExperimentConfig c;
  c.spins = {coupled_spin(c, 700.0)};
  c.rabi.amplitudes = {0.0};
  c.rabi.points = 11;
  c.rabi.sequences = 2000;
  const auto r = run_rabi(c, 0, {1, 1, nullptr});
  CHECK(r.fits.empty());
  CHECK_FALSE(r.warnings.empty());
  for (const auto& p : r.points) {
    CHECK(p.excitation == 0.0);
    CHECK(std::abs(p.c_tilde.mean) < 4 * p.c_tilde.sem + 1e-12);
  }
}

TEST_CASE("rabi frequency follows the drive amplitude") {
  ExperimentConfig c;
  c.spins = {coupled_spin(c, 700.0)};
  c.rabi.amplitudes = {0.5, 1.0};
  c.rabi.sequences = 4000;
  const auto r = run_rabi(c, 0, {2, 1, nullptr});
  CHECK(r.value("rabi_frequency_1") == doctest::Approx(0.5e6).epsilon(0.05));
  CHECK(r.value("rabi_slope") == doctest::Approx(0.5e6).epsilon(0.05));
}

TEST_CASE("ensemble line width") {
  ExperimentConfig c;
  c.crystal.er_concentration = 1e-7;  // ~1e5 spins for a smooth histogram
  const auto spins = sample_spin_ensemble(c.crystal, c.ensemble, c.resonator, c.field, c.nonradiative, 5);
  REQUIRE(spins.size() > 50000);
  const auto fields = resonance_fields(spins, c.field.theta, c.field.beta, c.resonator.omega0);
  const auto cal = calibrate_linewidth(c.ensemble, c.resonator, c.field);

  // Histogram around the center, smoothed, then read off the half-maximum crossings.
  const double w = 10e-6;
  const int half_bins = 200;
  std::vector<double> h(2 * half_bins, 0.0);
  for (double b : fields) {
    const int k = static_cast<int>(std::floor((b - cal.center_field) / w)) + half_bins;
    if (k >= 0 && k < 2 * half_bins) h[k] += 1;
  }
  std::vector<double> sm(h.size(), 0.0);
  for (int i = 2; i + 2 < static_cast<int>(h.size()); ++i) {
    for (int j = -2; j <= 2; ++j) sm[i] += h[i + j] / 5;
  }
  const auto peak = std::max_element(sm.begin(), sm.end()) - sm.begin();
  int lo = static_cast<int>(peak), hi = static_cast<int>(peak);
  while (lo > 0 && sm[lo] > sm[peak] / 2) --lo;
  while (hi + 1 < static_cast<int>(sm.size()) && sm[hi] > sm[peak] / 2) ++hi;
  const double fwhm = (hi - lo) * w;
  CHECK(fwhm == doctest::Approx(c.ensemble.linewidth_fwhm).epsilon(0.05));

  // Same seed, same ensemble.
  const auto again = sample_spin_ensemble(c.crystal, c.ensemble, c.resonator, c.field, c.nonradiative, 5);
  CHECK(again == spins);
}

TEST_CASE("measured SNR tracks the analytic value") {
  CounterRng rng(17, 0, 0, StreamId::kSpinDynamics);
  int within = 0;
  const int draws = 20;
  for (int i = 0; i < draws; ++i) {
    ExperimentConfig c;
    const double gamma_r = 400.0 + 800.0 * rng.uniform();
    c.protocol.t_r = 5e-3 + 5e-3 * rng.uniform();
    c.protocol.t_d = 1e-3 + 2e-3 * rng.uniform();
    c.spins = {coupled_spin(c, gamma_r)};
    c.snr.measurement_times = {1.0};
    c.snr.total_time = 1500.0;
    const auto r = run_snr(c, 0, {static_cast<std::uint64_t>(i + 1), 1, nullptr});
    const auto& row = r.rows.front();
    CAPTURE(gamma_r);
    CAPTURE(row.analytic);
    CAPTURE(row.measured.snr);
    within += std::abs(row.measured.snr / row.analytic - 1.0) < 0.1;
  }
  // Each draw has a few percent statistical error; allow one outlier.
  CHECK(within >= draws - 1);
}
