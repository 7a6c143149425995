#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "spincount/units.hpp"

namespace spincount {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Vec3&) const = default;
};

/// Small rotations (rad) of a spin's symmetry axis away from the crystal
/// c-axis: `a` about the in-plane axis perpendicular to the wire, `b` about
/// the surface normal direction.
struct AxisTilt {
  double a = 0.0;
  double b = 0.0;

  bool operator==(const AxisTilt&) const = default;
};

/// Axially symmetric gyromagnetic tensor (rad s^-1 T^-1).
struct GyromagneticTensor {
  double gamma_parallel = constants::kGammaParallel;
  double gamma_perp = constants::kGammaPerp;
  AxisTilt axis_tilt;

  void validate() const;
  bool operator==(const GyromagneticTensor&) const = default;
};

/// One emitter. Position is relative to the wire center line: x across the
/// wire in the chip plane, y depth below the surface (y >= 0 inside the
/// crystal), z along the wire.
struct SpinCenter {
  std::uint32_t id = 0;
  Vec3 position;
  GyromagneticTensor tensor;
  double t2_star = 170e-6;
  double t2_echo = 2.47e-3;
  double t2_pdd = 2.99e-3;
  double gamma_nr = 0.0;  // non-radiative relaxation rate, 1/s

  /// Throws ValidationError unless all times are positive and
  /// t2_star <= t2_echo.
  void validate() const;
  bool operator==(const SpinCenter&) const = default;
};

/// Lumped LC resonator with a thin inductive wire.
struct ResonatorModel {
  double omega0 = constants::kTwoPi * 7.335e9;
  double kappa_c = 1.7e6;
  double kappa_i = 1.3e6;
  double impedance = 17.5;
  double wire_length = 100e-6;
  double wire_width = 600e-9;
  double wire_thickness = 50e-9;
  // Multiplies the thin-wire field.
  double inductance_participation = 1.0;
  // Distances to the wire axis below this are evaluated at the cutoff.
  double field_cutoff = 25e-9;

  double kappa() const noexcept { return kappa_c + kappa_i; }
  void validate() const;
  bool operator==(const ResonatorModel&) const = default;
};

/// Single microwave photon detector figures of merit.
struct DetectorModel {
  double eta_smpd = 0.32;
  double dark_rate = 106.0;
  double cycle_duration = 12.8e-6;
  double detection_window = 10e-6;
  double readout_duration = 2e-6;
  double bandwidth_fwhm = 0.9e6;  // Hz
  double saturation_flux = 1e4;   // photons/s at the detector input
  double eta_loss = 0.66;
  // Drop photons that arrive outside the detection window of their cycle.
  bool explicit_dead_time = false;

  void validate() const;
  bool operator==(const DetectorModel&) const = default;
};

/// Static field amplitude and orientation. `theta` is the in-plane angle to
/// the projection of the c-axis, `beta` the angle between c-axis and chip plane.
struct FieldSetting {
  double b0 = 0.4203;
  double theta = 0.0;
  double beta = 0.5 * constants::kPi / 180.0;

  void validate() const;
  bool operator==(const FieldSetting&) const = default;
};

/// Repetition period, integration window and total measurement time.
struct ProtocolParams {
  double t_r = 7.5e-3;
  double t_d = 2e-3;
  double t_m = 1.0;

  void validate() const;
  std::size_t sequences() const;
  bool operator==(const ProtocolParams&) const = default;
};

/// Host crystal and the sampling box for the erbium ensemble. The box spans
/// x in [-X/2, X/2], y in [0, Y], z in [-Z/2, Z/2].
struct CrystalModel {
  double lattice_a = 0.524e-9;
  double lattice_c = 1.137e-9;
  double sites_per_cell = 4.0;
  double er_concentration = 3.1e-9;
  Vec3 detection_box{4e-6, 2e-6, 10e-6};

  double site_density() const noexcept;  // Ca sites per m^3
  double box_volume() const noexcept;
  double mean_spin_count() const noexcept;
  void validate() const;
  bool operator==(const CrystalModel&) const = default;
};

enum class LineShape { kLorentzian, kGaussian };

std::string_view to_string(LineShape s);
LineShape line_shape_from_string(std::string_view s);

/// Distribution parameters for the per-spin tensor deviations and coherence
/// times. `linewidth_fwhm` is the target FWHM (tesla) of the ensemble
/// resonance-field distribution.
struct EnsembleSpec {
  double linewidth_fwhm = 0.45e-3;
  LineShape shape = LineShape::kLorentzian;
  double truncation = 100.0;  // Lorentzian tails cut at this many half widths
  double gamma_perp_spread = 0.01;  // relative standard deviation
  double tilt_spread = 0.01 * constants::kPi / 180.0;
  double t2_star_min = 5e-6;
  double t2_star_max = 315e-6;
  double t2_echo_min = 1.38e-3;
  double t2_echo_max = 2.47e-3;

  void validate() const;
  bool operator==(const EnsembleSpec&) const = default;
};

/// Reference point for the direct-phonon non-radiative rate, measured with
/// the field along c.
struct NonRadiativeReference {
  double t1 = 0.213;
  double omega = constants::kTwoPi * 7.853e9;

  double rate() const noexcept { return 1.0 / t1; }
  double field() const noexcept { return omega / constants::kGammaParallel; }
  void validate() const;
  bool operator==(const NonRadiativeReference&) const = default;
};

/// Phenomenological pulse-induced background. Disabled when both amplitudes
/// are zero.
struct HeatingModel {
  double amplitude = 0.0;      // counts/s per unit pulse energy (amplitude^2 * s)
  double decay_time = 100e-6;  // s
  double offset_counts = 0.0;  // saturating extra counts per sequence
  double buildup_time = 20e-6;  // s of pulse at unit amplitude to saturate the offset

  bool enabled() const noexcept { return amplitude > 0.0 || offset_counts > 0.0; }
  void validate() const;
  bool operator==(const HeatingModel&) const = default;
};

}  // namespace spincount
