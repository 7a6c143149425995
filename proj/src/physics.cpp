#include "spincount/physics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "spincount/field_map.hpp"

namespace spincount {

using constants::kPi;

Vec3 field_direction(double theta, double beta) noexcept {
  (void)beta;  // the field lies in the chip plane
  return {std::sin(theta), 0.0, std::cos(theta)};
}

Vec3 symmetry_axis(const GyromagneticTensor& tensor, double beta) noexcept {
  const double a = tensor.axis_tilt.a;
  const double b = tensor.axis_tilt.b;
  const double n1 = std::sin(a) * std::cos(b);
  const double n2 = std::sin(b);
  const double n3 = std::cos(a) * std::cos(b);
  const double cb = std::cos(beta);
  const double sb = std::sin(beta);
  // Crystal frame: e1 = x, e2 = (0, cos beta, -sin beta), c = (0, sin beta, cos beta).
  return {n1, n2 * cb + n3 * sb, -n2 * sb + n3 * cb};
}

double effective_gamma(const GyromagneticTensor& tensor, double theta, double beta) noexcept {
  const Vec3 b = field_direction(theta, beta);
  const Vec3 n = symmetry_axis(tensor, beta);
  const double u = b.x * n.x + b.y * n.y + b.z * n.z;
  const double u2 = std::min(1.0, u * u);
  const double gp = tensor.gamma_parallel;
  const double gt = tensor.gamma_perp;
  return std::sqrt(gp * gp * u2 + gt * gt * (1.0 - u2));
}

double spin_frequency(const GyromagneticTensor& tensor, const FieldSetting& field) noexcept {
  return field.b0 * effective_gamma(tensor, field.theta, field.beta);
}

double resonance_field(const GyromagneticTensor& tensor, double theta, double beta,
                       double omega) noexcept {
  return omega / effective_gamma(tensor, theta, beta);
}

std::vector<double> alignment_curve(const GyromagneticTensor& tensor, double omega0, double beta,
                                    const std::vector<double>& thetas) {
  GyromagneticTensor aligned = tensor;
  aligned.axis_tilt = {};
  std::vector<double> out;
  out.reserve(thetas.size());
  for (double theta : thetas) {
    // cos is even, so evaluating at |theta| makes the symmetry exact.
    out.push_back(resonance_field(aligned, std::abs(theta), beta, omega0));
  }
  return out;
}

double vacuum_current(const ResonatorModel& resonator) noexcept {
  return resonator.omega0 * std::sqrt(constants::kHbar / (2.0 * resonator.impedance));
}

double vacuum_field(const ResonatorModel& resonator, double x, double y) {
  const double r = std::hypot(x, y);
  if (r == 0.0) throw SingularityError("vacuum field evaluated on the wire axis");
  const double rr = std::max(r, resonator.field_cutoff);
  return resonator.inductance_participation * constants::kMu0 * vacuum_current(resonator) /
         (2.0 * kPi * rr);
}

double coupling_from_field(double gamma_perp, double field) noexcept { return 0.5 * gamma_perp * field; }

double coupling_strength(const SpinCenter& spin, const ResonatorModel& resonator, const FieldMap* map) {
  const double b1 = map ? map->value(spin.position.x, spin.position.y)
                        : vacuum_field(resonator, spin.position.x, spin.position.y);
  return coupling_from_field(spin.tensor.gamma_perp, b1);
}

double distance_for_coupling(const ResonatorModel& resonator, double gamma_perp, double g0) {
  if (!(g0 > 0.0)) throw std::invalid_argument("g0 must be > 0");
  const double k = 0.5 * gamma_perp * resonator.inductance_participation * constants::kMu0 *
                   vacuum_current(resonator) / (2.0 * kPi);
  const double r = k / g0;
  if (r < resonator.field_cutoff) {
    throw std::invalid_argument(fmt::format("g0 = {} rad/s is above the near-wire maximum", g0));
  }
  return r;
}

double purcell_rate(double g0, double delta, double kappa) noexcept {
  return kappa * g0 * g0 / (delta * delta + 0.25 * kappa * kappa);
}

double nonradiative_rate(const NonRadiativeReference& reference, double b0, double omega) noexcept {
  const double rb = b0 / reference.field();
  const double rw = omega / reference.omega;
  return reference.rate() * rb * rb * rw * rw * rw;
}

double efficiency_product(double branching, double coupling_ratio, double eta_loss, double eta_smpd) {
  return branching * coupling_ratio * eta_loss * eta_smpd;
}

RateBreakdown efficiency_chain(double gamma_r, double gamma_nr, const ResonatorModel& resonator,
                               const DetectorModel& detector) {
  if (gamma_r < 0.0 || gamma_nr < 0.0) throw std::invalid_argument("rates must be >= 0");
  RateBreakdown out;
  out.gamma_r = gamma_r;
  out.gamma_nr = gamma_nr;
  const double total = gamma_r + gamma_nr;
  out.branching = total > 0.0 ? gamma_r / total : 0.0;
  out.coupling_ratio = resonator.kappa_c / resonator.kappa();
  out.eta_loss = detector.eta_loss;
  out.eta_smpd = detector.eta_smpd;
  out.eta_total = efficiency_product(out.branching, out.coupling_ratio, out.eta_loss, out.eta_smpd);
  return out;
}

std::complex<double> reflection_coefficient(const ResonatorModel& resonator, double delta) {
  using namespace std::complex_literals;
  const double kc = resonator.kappa_c;
  const double ki = resonator.kappa_i;
  return (kc - ki - 2.0i * delta) / (kc + ki + 2.0i * delta);
}

double dissipated_fraction(const ResonatorModel& resonator, double delta) {
  const double kc = resonator.kappa_c;
  const double ki = resonator.kappa_i;
  return 4.0 * kc * ki / ((kc + ki) * (kc + ki) + 4.0 * delta * delta);
}

double thermal_occupancy(double omega, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  const double x = constants::kHbar * omega / (constants::kBoltzmann * temperature);
  return 1.0 / std::expm1(x);
}

double temperature_for_occupancy(double omega, double occupancy) {
  if (!(occupancy > 0.0)) throw std::invalid_argument("occupancy must be > 0");
  return constants::kHbar * omega / (constants::kBoltzmann * std::log1p(1.0 / occupancy));
}

double bandwidth_factor(const DetectorModel& detector, double delta) noexcept {
  const double half_width = kPi * detector.bandwidth_fwhm;  // rad/s
  const double r = delta / half_width;
  return 1.0 / (1.0 + r * r);
}

SpinRates spin_rates(const SpinCenter& spin, const ResonatorModel& resonator,
                     const FieldSetting& field, const DetectorModel& detector, const FieldMap* map) {
  SpinRates out;
  out.omega_s = spin_frequency(spin.tensor, field);
  out.g0 = coupling_strength(spin, resonator, map);
  out.detuning = out.omega_s - resonator.omega0;
  out.gamma_r = purcell_rate(out.g0, out.detuning, resonator.kappa());
  out.gamma_nr = spin.gamma_nr;
  out.gamma_total = out.gamma_r + out.gamma_nr;
  out.branching = out.gamma_total > 0.0 ? out.gamma_r / out.gamma_total : 0.0;
  out.detection = resonator.kappa_c / resonator.kappa() * detector.eta_loss *
                  bandwidth_factor(detector, out.detuning);
  return out;
}

}  // namespace spincount
