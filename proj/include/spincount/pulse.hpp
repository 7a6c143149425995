#pragma once

#include <string>
#include <variant>
#include <vector>

#include "spincount/model.hpp"

namespace spincount {

struct Pulse {
  double phase = 0.0;     // rotation axis angle in the xy plane, rad
  double rotation = 0.0;  // nominal on-resonance rotation angle, rad
  double duration = 0.0;  // s
  double amplitude = 1.0; // drive amplitude, a.u.
};

struct Delay {
  double duration = 0.0;
};

using SequenceElement = std::variant<Pulse, Delay>;

enum class SequenceShape { kEmpty, kSingle, kRamsey, kHahn, kPdd };

/// Pulse block played at the start of every repetition. Free-evolution
/// delays are the gaps between pulses; the readout follows the last element.
struct PulseSequence {
  std::vector<SequenceElement> elements;
  double repetition = 7.5e-3;  // t_r
  double readout_window = 2e-3;  // t_d
  // Sign applied to the spin detuning in the Ramsey phase.
  int detuning_sign = +1;
  // Rabi scans parameterize pulses by duration and amplitude; their rotation
  // may exceed 2 pi.
  bool free_rotation = false;

  double block_duration() const noexcept;
  double record_length() const noexcept { return repetition - block_duration(); }
  std::size_t pulse_count() const noexcept;
  /// Sum of amplitude^2 * duration over pulses.
  double pulse_energy() const noexcept;
  /// Longest pulse duration scaled by its amplitude; drives the heating offset.
  double drive_area() const noexcept;
  /// Classifies the element list; throws std::invalid_argument for anything
  /// without a closed form.
  SequenceShape shape() const;
  void validate() const;
  std::string describe() const;

  static PulseSequence empty(double repetition, double readout_window);
  static PulseSequence single(double rotation, double duration, double repetition,
                              double readout_window, double amplitude = 1.0);
  /// Rabi pulse: rotation = rabi_coeff * amplitude * duration.
  static PulseSequence rabi(double duration, double amplitude, double rabi_coeff,
                            double repetition, double readout_window);
  /// pi/2 - tau - pi/2 with the second pulse phase 2 pi * ramp * tau.
  static PulseSequence ramsey(double tau, double half_pi_duration, double ramp, double repetition,
                              double readout_window);
  /// pi/2 - tau - pi - tau - pi/2.
  static PulseSequence hahn(double tau, double half_pi_duration, double ramp, double repetition,
                            double readout_window);
  /// pi/2 - tau - pi - tau - pi - tau - pi - tau - pi/2 (periodic spacing).
  static PulseSequence pdd(double tau, double half_pi_duration, double ramp, double repetition,
                           double readout_window);
};

/// sin^2(Omega T / 2) with Omega = rabi_coeff * amplitude.
double rabi_excitation(double duration, double amplitude, double rabi_coeff) noexcept;

/// Probability that a spin starting in the ground state is excited after the
/// block. `delta` is the spin-drive detuning (rad/s).
///
/// Conventions: all pulses rotate about axes in the xy plane with phases
/// taken from the sequence. Two pi/2 pulses about the same axis compose to a
/// pi pulse, so Ramsey at tau = 0 and phi = 0 gives p_e = 1; the echo
/// sequences return to the ground state at tau = 0. Echo envelopes are
/// exp(-2 tau / T2) for Hahn and exp(-4 tau / T2_pdd) for PDD, tau being the
/// inter-pulse gap.
double sequence_excitation(const PulseSequence& seq, const SpinCenter& spin, double delta);

}  // namespace spincount
