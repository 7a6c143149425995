#include "spincount/pulse.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace spincount {

using constants::kPi;
using constants::kTwoPi;

namespace {

bool near(double a, double b) { return std::abs(a - b) < 1e-9; }

struct Flattened {
  std::vector<Pulse> pulses;
  std::vector<double> gaps;  // gaps[i] follows pulses[i]
};

Flattened flatten(const std::vector<SequenceElement>& elements) {
  Flattened f;
  double pending = 0.0;
  for (const auto& e : elements) {
    if (const auto* p = std::get_if<Pulse>(&e)) {
      if (!f.pulses.empty()) f.gaps.push_back(pending);
      pending = 0.0;
      f.pulses.push_back(*p);
    } else {
      pending += std::get<Delay>(e).duration;
    }
  }
  return f;
}

bool all_equal(const std::vector<double>& v) {
  for (double x : v) {
    if (!near(x, v.front())) return false;
  }
  return true;
}

PulseSequence echo_train(std::size_t n_pi, double tau, double t90, double ramp, double repetition,
                         double readout_window) {
  PulseSequence seq;
  seq.repetition = repetition;
  seq.readout_window = readout_window;
  seq.elements.push_back(Pulse{0.0, kPi / 2, t90, 1.0});
  for (std::size_t i = 0; i < n_pi; ++i) {
    seq.elements.push_back(Delay{tau});
    seq.elements.push_back(Pulse{0.0, kPi, 2.0 * t90, 1.0});
  }
  seq.elements.push_back(Delay{tau});
  seq.elements.push_back(Pulse{kTwoPi * ramp * tau, kPi / 2, t90, 1.0});
  return seq;
}

}  // namespace

double PulseSequence::block_duration() const noexcept {
  double total = 0.0;
  for (const auto& e : elements) {
    total += std::visit([](const auto& x) { return x.duration; }, e);
  }
  return total;
}

std::size_t PulseSequence::pulse_count() const noexcept {
  std::size_t n = 0;
  for (const auto& e : elements) n += std::holds_alternative<Pulse>(e) ? 1 : 0;
  return n;
}

double PulseSequence::pulse_energy() const noexcept {
  double e = 0.0;
  for (const auto& el : elements) {
    if (const auto* p = std::get_if<Pulse>(&el)) e += p->amplitude * p->amplitude * p->duration;
  }
  return e;
}

double PulseSequence::drive_area() const noexcept {
  double a = 0.0;
  for (const auto& el : elements) {
    if (const auto* p = std::get_if<Pulse>(&el)) a = std::max(a, std::abs(p->amplitude) * p->duration);
  }
  return a;
}

SequenceShape PulseSequence::shape() const {
  const Flattened f = flatten(elements);
  const std::size_t n = f.pulses.size();
  if (n == 0) return SequenceShape::kEmpty;
  if (n == 1) return SequenceShape::kSingle;
  const auto rot = [&](std::size_t i) { return f.pulses[i].rotation; };
  const bool half_ends = near(rot(0), kPi / 2) && near(rot(n - 1), kPi / 2);
  if (n == 2 && half_ends) return SequenceShape::kRamsey;
  if (half_ends && (n == 3 || n == 5)) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (!near(rot(i), kPi)) throw std::invalid_argument("echo sequences need pi refocusing pulses");
    }
    if (!all_equal(f.gaps)) throw std::invalid_argument("echo sequences need equal gaps");
    return n == 3 ? SequenceShape::kHahn : SequenceShape::kPdd;
  }
  throw std::invalid_argument(fmt::format("no closed form for sequence '{}'", describe()));
}

void PulseSequence::validate() const {
  if (!(repetition > 0.0)) throw std::invalid_argument("repetition must be > 0");
  if (!(readout_window > 0.0)) throw std::invalid_argument("readout window must be > 0");
  for (const auto& e : elements) {
    const double d = std::visit([](const auto& x) { return x.duration; }, e);
    if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("element durations must be >= 0");
    if (const auto* p = std::get_if<Pulse>(&e)) {
      const bool in_range = p->rotation >= 0.0 && (free_rotation || p->rotation <= kTwoPi + 1e-12);
      if (!in_range) throw std::invalid_argument("pulse rotation must lie in [0, 2 pi]");
    }
  }
  if (block_duration() > repetition) {
    throw std::invalid_argument("pulse block is longer than the repetition period");
  }
  if (readout_window > record_length() * (1.0 + 1e-12)) {
    throw std::invalid_argument("readout window extends past the next repetition");
  }
  shape();
}

std::string PulseSequence::describe() const {
  std::string out;
  for (const auto& e : elements) {
    if (!out.empty()) out += " ";
    if (const auto* p = std::get_if<Pulse>(&e)) {
      out += fmt::format("P({:.4g}rad,phi={:.4g},{:.4g}s,A={:.4g})", p->rotation, p->phase,
                         p->duration, p->amplitude);
    } else {
      out += fmt::format("D({:.4g}s)", std::get<Delay>(e).duration);
    }
  }
  if (out.empty()) out = "none";
  return fmt::format("{} | t_r={:.6g}s t_d={:.6g}s", out, repetition, readout_window);
}

PulseSequence PulseSequence::empty(double repetition, double readout_window) {
  PulseSequence seq;
  seq.repetition = repetition;
  seq.readout_window = readout_window;
  return seq;
}

PulseSequence PulseSequence::single(double rotation, double duration, double repetition,
                                    double readout_window, double amplitude) {
  PulseSequence seq = empty(repetition, readout_window);
  seq.elements.push_back(Pulse{0.0, rotation, duration, amplitude});
  return seq;
}

PulseSequence PulseSequence::rabi(double duration, double amplitude, double rabi_coeff,
                                  double repetition, double readout_window) {
  PulseSequence seq = empty(repetition, readout_window);
  seq.free_rotation = true;
  if (duration > 0.0) {
    seq.elements.push_back(Pulse{0.0, std::abs(rabi_coeff * amplitude) * duration, duration, amplitude});
  }
  return seq;
}

PulseSequence PulseSequence::ramsey(double tau, double t90, double ramp, double repetition,
                                    double readout_window) {
  return echo_train(0, tau, t90, ramp, repetition, readout_window);
}

PulseSequence PulseSequence::hahn(double tau, double t90, double ramp, double repetition,
                                  double readout_window) {
  return echo_train(1, tau, t90, ramp, repetition, readout_window);
}

PulseSequence PulseSequence::pdd(double tau, double t90, double ramp, double repetition,
                                 double readout_window) {
  return echo_train(3, tau, t90, ramp, repetition, readout_window);
}

double rabi_excitation(double duration, double amplitude, double rabi_coeff) noexcept {
  const double s = std::sin(0.5 * rabi_coeff * amplitude * duration);
  return s * s;
}

double sequence_excitation(const PulseSequence& seq, const SpinCenter& spin, double delta) {
  const Flattened f = flatten(seq.elements);
  switch (seq.shape()) {
    case SequenceShape::kEmpty:
      return 0.0;
    case SequenceShape::kSingle: {
      const Pulse& p = f.pulses.front();
      if (p.duration <= 0.0 || p.rotation == 0.0) return 0.0;
      const double omega = p.rotation / p.duration;
      const double w2 = omega * omega + delta * delta;
      const double s = std::sin(0.5 * std::sqrt(w2) * p.duration);
      return omega * omega / w2 * s * s;
    }
    case SequenceShape::kRamsey: {
      const double tau = f.gaps.front();
      const double phi = f.pulses.back().phase - f.pulses.front().phase;
      const double env = std::exp(-(tau / spin.t2_star) * (tau / spin.t2_star));
      return 0.5 * (1.0 + env * std::cos(phi + seq.detuning_sign * delta * tau));
    }
    case SequenceShape::kHahn: {
      const double tau = f.gaps.front();
      const double phi = f.pulses.back().phase - f.pulses.front().phase;
      return 0.5 * (1.0 - std::exp(-2.0 * tau / spin.t2_echo) * std::cos(phi));
    }
    case SequenceShape::kPdd: {
      const double tau = f.gaps.front();
      const double phi = f.pulses.back().phase - f.pulses.front().phase;
      return 0.5 * (1.0 - std::exp(-4.0 * tau / spin.t2_pdd) * std::cos(phi));
    }
  }
  return 0.0;
}

}  // namespace spincount
