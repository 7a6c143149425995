#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "spincount/model.hpp"

namespace spincount {

class FieldMap;

struct SingularityError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Unit vector of the static field in lab coordinates.
Vec3 field_direction(double theta, double beta) noexcept;

/// Symmetry axis of a spin's tensor in lab coordinates, including its tilt.
Vec3 symmetry_axis(const GyromagneticTensor& tensor, double beta) noexcept;

/// Effective gyromagnetic ratio along the static field direction.
double effective_gamma(const GyromagneticTensor& tensor, double theta, double beta) noexcept;

/// Larmor angular frequency.
double spin_frequency(const GyromagneticTensor& tensor, const FieldSetting& field) noexcept;

/// Static field amplitude that brings the spin into resonance with `omega`.
double resonance_field(const GyromagneticTensor& tensor, double theta, double beta,
                       double omega) noexcept;

/// Peak field versus in-plane angle for an untilted tensor.
std::vector<double> alignment_curve(const GyromagneticTensor& tensor, double omega0, double beta,
                                    const std::vector<double>& thetas);

/// Zero-point current amplitude in the wire (A).
double vacuum_current(const ResonatorModel& resonator) noexcept;

/// |dB1| (T) of the thin-wire model. Distances to the wire axis below the
/// configured cutoff are evaluated at the cutoff; exactly zero distance throws.
double vacuum_field(const ResonatorModel& resonator, double x, double y);

/// Coupling from a field amplitude: g0 = gamma_perp * |dB1| / 2.
double coupling_from_field(double gamma_perp, double field) noexcept;

/// g0 (rad/s) of a spin, using `map` instead of the thin-wire model when given.
double coupling_strength(const SpinCenter& spin, const ResonatorModel& resonator,
                         const FieldMap* map = nullptr);

/// Distance from the wire axis at which a spin with `gamma_perp` reaches g0.
double distance_for_coupling(const ResonatorModel& resonator, double gamma_perp, double g0);

double purcell_rate(double g0, double delta, double kappa) noexcept;

/// Direct-phonon rate scaled from a reference point as B^2 omega^3.
double nonradiative_rate(const NonRadiativeReference& reference, double b0, double omega) noexcept;

struct RateBreakdown {
  double gamma_r = 0.0;
  double gamma_nr = 0.0;
  double branching = 0.0;
  double coupling_ratio = 0.0;
  double eta_loss = 0.0;
  double eta_smpd = 0.0;
  double eta_total = 0.0;
};

RateBreakdown efficiency_chain(double gamma_r, double gamma_nr, const ResonatorModel& resonator,
                               const DetectorModel& detector);
double efficiency_product(double branching, double coupling_ratio, double eta_loss,
                          double eta_smpd);

/// One-port reflection at probe detuning delta (rad/s).
std::complex<double> reflection_coefficient(const ResonatorModel& resonator, double delta);
double dissipated_fraction(const ResonatorModel& resonator, double delta);

/// Bose-Einstein occupation of a mode at angular frequency omega.
double thermal_occupancy(double omega, double temperature);
double temperature_for_occupancy(double omega, double occupancy);

/// Lorentzian detector bandwidth weight at detuning delta (rad/s).
double bandwidth_factor(const DetectorModel& detector, double delta) noexcept;

/// Everything the engine needs about one spin at one field setting.
struct SpinRates {
  double omega_s = 0.0;
  double g0 = 0.0;
  double detuning = 0.0;  // omega_s - omega0
  double gamma_r = 0.0;
  double gamma_nr = 0.0;
  double gamma_total = 0.0;
  double branching = 0.0;
  double detection = 0.0;  // kc/k * eta_loss * bandwidth weight, excluding eta_smpd
};

SpinRates spin_rates(const SpinCenter& spin, const ResonatorModel& resonator,
                     const FieldSetting& field, const DetectorModel& detector,
                     const FieldMap* map = nullptr);

}  // namespace spincount
