#include <doctest.h>

#include <cmath>
#include <sstream>

#include "spincount/analysis.hpp"
#include "spincount/engine.hpp"

using namespace spincount;

namespace {

Hardware hardware() {
  Hardware hw;
  hw.field.b0 = resonance_field(GyromagneticTensor{}, hw.field.theta, hw.field.beta, hw.resonator.omega0);
  return hw;
}

SpinCenter spin_at(std::uint32_t id, double y, double z = 0.0, double gamma_nr = 3.3) {
  SpinCenter s;
  s.id = id;
  s.position = {0.0, y, z};
  s.gamma_nr = gamma_nr;
  return s;
}

std::string binary(const ClickStream& c) {
  std::ostringstream out;
  c.write_binary(out);
  return out.str();
}

}  // namespace

TEST_CASE("click stream round trips through text and binary") {
  ClickStream c(5e-3, 12.8e-6);
  c.append_sequence({{0, 1.0e-6}, {3, 40.123456789e-6}});
  c.append_sequence({});
  c.append_sequence({{100, 1.28e-3 + 1e-9}});
  c.set_metadata(R"({"seed":1})");
  CHECK(c.sequence_count() == 3);
  CHECK(c.click_count() == 3);
  CHECK(c.count_in(0, 0.0, 20e-6) == 1);

  std::stringstream bin;
  c.write_binary(bin);
  CHECK(ClickStream::read_binary(bin) == c);
  std::stringstream txt;
  c.write_text(txt);
  CHECK(ClickStream::read_text(txt) == c);

  const auto recs = c.records();
  CHECK(ClickStream::from_records(recs, 3, 5e-3, 12.8e-6).records() == recs);

  std::stringstream bad("NOTCLICK");
  CHECK_THROWS(ClickStream::read_binary(bad));
  ClickStream unsorted(5e-3, 12.8e-6);
  CHECK_THROWS(unsorted.append_sequence({{2, 30e-6}, {1, 20e-6}}));
}

TEST_CASE("output is byte-identical for any worker count") {
  const Hardware hw = hardware();
  std::vector<SpinCenter> spins;
  for (std::uint32_t i = 0; i < 5; ++i) spins.push_back(spin_at(i, 240e-9 + 20e-9 * i, 1e-6 * i));
  const auto seq = PulseSequence::single(constants::kPi, 1e-6, 7.5e-3, 2e-3);
  std::string reference;
  for (std::size_t workers : {1, 2, 3, 8}) {
    SimulationOptions opt;
    opt.workers = workers;
    const auto r = simulate(hw, spins, seq, 20000, 77, opt);
    const auto bytes = binary(r.clicks);
    if (reference.empty()) {
      reference = bytes;
      CHECK(r.photon_clicks > 0);
    } else {
      CHECK(bytes == reference);
    }
  }
  const auto other = simulate(hw, spins, seq, 20000, 78);
  CHECK(binary(other.clicks) != reference);
}

TEST_CASE("a prefix run reproduces the start of a longer run") {
  const Hardware hw = hardware();
  const auto seq = PulseSequence::single(constants::kPi, 1e-6, 7.5e-3, 2e-3);
  SimulationOptions opt;
  opt.burn_in = 100;
  const auto a = simulate(hw, {spin_at(0, 257e-9)}, seq, 1000, 5, opt);
  const auto b = simulate(hw, {spin_at(0, 257e-9)}, seq, 3000, 5, opt);
  for (std::size_t i = 0; i < 1000; ++i) {
    const auto sa = a.clicks.sequence(i);
    const auto sb = b.clicks.sequence(i);
    REQUIRE(sa.size() == sb.size());
    for (std::size_t k = 0; k < sa.size(); ++k) CHECK(sa[k] == sb[k]);
  }
}

TEST_CASE("dark counts are Poissonian") {
  Hardware hw = hardware();
  const auto seq = PulseSequence::empty(7.5e-3, 2e-3);
  const auto r = simulate(hw, {}, seq, 1000000, 21);
  const auto counts = window_counts(r.clicks, 0.0, 2e-3);
  double s = 0, s2 = 0;
  for (auto c : counts) {
    s += c;
    s2 += static_cast<double>(c) * c;
  }
  const double n = static_cast<double>(counts.size());
  const double mean = s / n;
  const double fano = (s2 / n - mean * mean) / mean;
  CHECK(mean == doctest::Approx(hw.detector.dark_rate * 2e-3).epsilon(0.01));
  CHECK(fano == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("corrected counts vanish on stationary streams") {
  Hardware hw = hardware();
  hw.detector.dark_rate = 500.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = simulate(hw, {}, PulseSequence::empty(7.5e-3, 4e-3), 100000, seed);
    const auto c = corrected_counts(r.clicks, 4e-3);
    CHECK(std::abs(c.mean) < 3.5 * c.sem);
    CHECK(c.samples == 100000);
  }
  // Driven spin far from the wire: counts still stationary.
  const auto r = simulate(hw, {spin_at(0, 5e-6)}, PulseSequence::single(constants::kPi, 1e-6, 7.5e-3, 4e-3), 100000, 9);
  const auto c = corrected_counts(r.clicks, 4e-3);
  CHECK(std::abs(c.mean) < 3.5 * c.sem);
}

TEST_CASE("steady-state polarization follows the tanh law") {
  Hardware hw = hardware();
  hw.detector.dark_rate = 0.0;
  const auto seq = PulseSequence::single(constants::kPi, 1e-6, 7.5e-3, 2e-3);
  // Gamma t_r >= 3 keeps sequence-to-sequence correlations weak.
  for (double gamma_nr : {400.0, 600.0, 1000.0}) {
    SimulationOptions opt;
    const std::size_t n = 200000;
    const auto r = simulate(hw, {spin_at(0, 300e-9, 0.0, gamma_nr)}, seq, n, 31, opt);
    const auto& t = r.spins[0];
    const double x = t.rates.gamma_total * seq.record_length();
    const double q = 0.5 * (1.0 - std::tanh(0.5 * x));
    const double sigma = std::sqrt(q * (1 - q) / n);
    const double measured = static_cast<double>(t.excited_before_pulse) / n;
    CHECK(std::abs(measured - q) < 3 * sigma);
  }
}

TEST_CASE("photon count tracks the expected signal") {
  Hardware hw = hardware();
  hw.detector.dark_rate = 0.0;
  const double kappa = hw.resonator.kappa();
  const double g0 = std::sqrt(700.0 * kappa / 4.0);
  const SpinCenter s = spin_at(0, distance_for_coupling(hw.resonator, constants::kGammaPerp, g0));
  const auto seq = PulseSequence::single(constants::kPi, 1e-6, 7.5e-3, 2e-3);
  const std::size_t n = 100000;
  const auto r = simulate(hw, {s}, seq, n, 4);
  const auto& t = r.spins[0];
  const double rec = seq.record_length();
  const double e = std::exp(-t.rates.gamma_total * rec);
  const double p_excited = 1.0 / (1.0 + e);  // after the pulse
  const double expected_emitted = n * p_excited * (1 - e) * t.rates.branching;
  CHECK(static_cast<double>(t.emitted) == doctest::Approx(expected_emitted).epsilon(0.02));
  CHECK(static_cast<double>(t.arrived) == doctest::Approx(expected_emitted * t.rates.detection).epsilon(0.03));
}

TEST_CASE("seed derivation and argument checks") {
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  Hardware hw = hardware();
  hw.detector.eta_smpd = 2.0;
  CHECK_THROWS_AS(simulate(hw, {}, PulseSequence::empty(7.5e-3, 2e-3), 10, 1), ValidationError);
}
