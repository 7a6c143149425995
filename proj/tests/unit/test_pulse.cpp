#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spincount/pulse.hpp"
#include "spincount/rng.hpp"

using namespace spincount;
using oracle::excited;
using oracle::mul;
using oracle::precession;
using oracle::rotation;

namespace {

constexpr double kPi = constants::kPi;

// Hard pulse of angle theta about the axis at angle phi.
oracle::M2 hard(double theta, double phi) { return rotation(theta, 0.0, phi, 1.0); }

SpinCenter coherent_spin() {
  SpinCenter s;
  s.t2_star = 1e15;
  s.t2_echo = 1e15;
  s.t2_pdd = 1e15;
  return s;
}

}  // namespace

TEST_CASE("single pulse matches the propagator, including detuning") {
  const SpinCenter s = coherent_spin();
  CounterRng rng(9, 0, 0, StreamId::kSpinDynamics);
  for (int i = 0; i < 100; ++i) {
    const double rot = 4.0 * kPi * rng.uniform();
    const double dur = 1e-7 + 2e-6 * rng.uniform();
    const double delta = (rng.uniform() - 0.5) * 4.0 * rot / dur;
    auto seq = PulseSequence::single(rot, dur, 10e-3, 2e-3);
    seq.free_rotation = true;
    const double want = excited(rotation(rot / dur, delta, 0.0, dur));
    CHECK(sequence_excitation(seq, s, delta) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("rabi oscillation") {
  const SpinCenter s = coherent_spin();
  const double coeff = constants::kTwoPi * 0.5e6;
  for (double t : {0.0, 0.25e-6, 0.5e-6, 1.0e-6, 1.7e-6, 3.9e-6}) {
    for (double a : {0.5, 1.0}) {
      const auto seq = PulseSequence::rabi(t, a, coeff, 10e-3, 4e-3);
      const double want = excited(rotation(coeff * a, 0.0, 0.0, t));
      CHECK(sequence_excitation(seq, s, 0.0) == doctest::Approx(want).epsilon(1e-9));
      CHECK(rabi_excitation(t, a, coeff) == doctest::Approx(want).epsilon(1e-9));
    }
  }
  CHECK(rabi_excitation(1e-6, 1.0, coeff) == doctest::Approx(1.0));
  CHECK(rabi_excitation(2e-6, 1.0, coeff) == doctest::Approx(0.0).scale(1.0));
  CHECK(rabi_excitation(1e-6, 2.0, coeff) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("ramsey matches the propagator with hard pulses") {
  const SpinCenter s = coherent_spin();
  CounterRng rng(10, 0, 0, StreamId::kSpinDynamics);
  for (int i = 0; i < 100; ++i) {
    const double tau = 400e-6 * rng.uniform();
    const double ramp = 5e4 * rng.uniform();
    const double delta = (rng.uniform() - 0.5) * 1e5;
    auto seq = PulseSequence::ramsey(tau, 0.5e-6, ramp, 10e-3, 4e-3);
    const double phi = constants::kTwoPi * ramp * tau;
    const auto u = mul(hard(kPi / 2, phi), mul(precession(delta * tau), hard(kPi / 2, 0.0)));
    // The propagator's detuning enters with the opposite sign to the default.
    seq.detuning_sign = -1;
    CHECK(sequence_excitation(seq, s, delta) == doctest::Approx(excited(u)).epsilon(1e-9));
    seq.detuning_sign = +1;
    CHECK(sequence_excitation(seq, s, -delta) == doctest::Approx(excited(u)).epsilon(1e-9));
  }
}

TEST_CASE("echo sequences refocus static detuning") {
  const SpinCenter s = coherent_spin();
  CounterRng rng(12, 0, 0, StreamId::kSpinDynamics);
  for (int i = 0; i < 50; ++i) {
    const double tau = 1e-3 * rng.uniform();
    const double ramp = 2e3 * rng.uniform();
    const double delta = (rng.uniform() - 0.5) * 1e6;
    const double phi = constants::kTwoPi * ramp * tau;
    const auto p = precession(delta * tau);

    const auto hahn = mul(hard(kPi / 2, phi), mul(p, mul(hard(kPi, 0.0), mul(p, hard(kPi / 2, 0.0)))));
    CHECK(sequence_excitation(PulseSequence::hahn(tau, 0.5e-6, ramp, 20e-3, 4e-3), s, delta) ==
          doctest::Approx(excited(hahn)).epsilon(1e-9));

    auto pdd = hard(kPi / 2, 0.0);
    for (int k = 0; k < 3; ++k) pdd = mul(hard(kPi, 0.0), mul(p, pdd));
    pdd = mul(hard(kPi / 2, phi), mul(p, pdd));
    CHECK(sequence_excitation(PulseSequence::pdd(tau, 0.5e-6, ramp, 20e-3, 4e-3), s, delta) ==
          doctest::Approx(excited(pdd)).epsilon(1e-9));
  }
}

TEST_CASE("limits at zero delay and decay envelopes") {
  SpinCenter s;
  CHECK(sequence_excitation(PulseSequence::ramsey(0.0, 0.5e-6, 25e3, 10e-3, 4e-3), s, 0.0) == doctest::Approx(1.0));
  CHECK(sequence_excitation(PulseSequence::hahn(0.0, 0.5e-6, 1e3, 20e-3, 4e-3), s, 0.0) == doctest::Approx(0.0));
  CHECK(sequence_excitation(PulseSequence::pdd(0.0, 0.5e-6, 1e3, 20e-3, 4e-3), s, 0.0) == doctest::Approx(0.0));
  CHECK(sequence_excitation(PulseSequence::empty(10e-3, 4e-3), s, 0.0) == 0.0);

  // Long delays wash the signal out to one half.
  CHECK(sequence_excitation(PulseSequence::ramsey(10 * s.t2_star, 0.5e-6, 25e3, 20e-3, 4e-3), s, 0.0) ==
        doctest::Approx(0.5));
  // At ramp phase pi the echo amplitude is the envelope itself.
  const double tau = 1e-3;
  const double ramp = 0.5 / tau;
  CHECK(sequence_excitation(PulseSequence::hahn(tau, 0.5e-6, ramp, 20e-3, 4e-3), s, 0.0) ==
        doctest::Approx(0.5 * (1 + std::exp(-2 * tau / s.t2_echo))));
  CHECK(sequence_excitation(PulseSequence::pdd(tau, 0.5e-6, ramp, 20e-3, 4e-3), s, 0.0) ==
        doctest::Approx(0.5 * (1 + std::exp(-4 * tau / s.t2_pdd))));
}

TEST_CASE("sequence bookkeeping") {
  const auto h = PulseSequence::hahn(100e-6, 0.5e-6, 1e3, 20e-3, 4e-3);
  CHECK(h.pulse_count() == 3);
  CHECK(h.shape() == SequenceShape::kHahn);
  CHECK(h.block_duration() == doctest::Approx(2e-6 + 200e-6));
  CHECK(h.record_length() == doctest::Approx(20e-3 - h.block_duration()));
  CHECK(h.pulse_energy() == doctest::Approx(2e-6));
  CHECK(PulseSequence::pdd(100e-6, 0.5e-6, 1e3, 20e-3, 4e-3).pulse_count() == 5);
  CHECK(PulseSequence::empty(10e-3, 4e-3).shape() == SequenceShape::kEmpty);

  PulseSequence odd;
  odd.elements = {Pulse{0.0, kPi, 1e-6}, Delay{1e-6}, Pulse{0.0, kPi, 1e-6}};
  CHECK_THROWS_AS(odd.shape(), std::invalid_argument);
  PulseSequence too_long = PulseSequence::single(kPi, 1e-6, 1e-6, 1e-6);
  CHECK_THROWS(too_long.validate());
}
