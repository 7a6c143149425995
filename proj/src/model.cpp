#include "spincount/model.hpp"

#include <cmath>
#include <fmt/format.h>

namespace spincount {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ValidationError(field, what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }
bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }
bool unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

void GyromagneticTensor::validate() const {
  require(finite_positive(gamma_parallel), "gamma_parallel", "must be > 0");
  require(finite_positive(gamma_perp), "gamma_perp", "must be > 0");
  require(std::isfinite(axis_tilt.a) && std::isfinite(axis_tilt.b), "axis_tilt", "must be finite");
}

void SpinCenter::validate() const {
  tensor.validate();
  require(std::isfinite(position.x) && std::isfinite(position.y) && std::isfinite(position.z),
          "position", "must be finite");
  require(finite_positive(t2_star), "t2_star", "must be > 0");
  require(finite_positive(t2_echo), "t2_echo", "must be > 0");
  require(finite_positive(t2_pdd), "t2_pdd", "must be > 0");
  require(t2_star <= t2_echo, "t2_star", "must not exceed t2_echo");
  require(finite_nonnegative(gamma_nr), "gamma_nr", "must be >= 0");
}

void ResonatorModel::validate() const {
  require(finite_positive(omega0), "omega0", "must be > 0");
  require(finite_nonnegative(kappa_c), "kappa_c", "must be >= 0");
  require(finite_nonnegative(kappa_i), "kappa_i", "must be >= 0");
  require(kappa() > 0.0, "kappa_c", "kappa_c + kappa_i must be > 0");
  require(finite_positive(impedance), "impedance", "must be > 0");
  require(finite_positive(wire_length), "wire_length", "must be > 0");
  require(finite_positive(wire_width), "wire_width", "must be > 0");
  require(finite_positive(wire_thickness), "wire_thickness", "must be > 0");
  require(finite_nonnegative(inductance_participation), "inductance_participation",
          "must be >= 0");
  require(finite_positive(field_cutoff), "field_cutoff", "must be > 0");
}

void DetectorModel::validate() const {
  require(unit_interval(eta_smpd), "eta_smpd", "must lie in [0, 1]");
  require(unit_interval(eta_loss), "eta_loss", "must lie in [0, 1]");
  require(finite_nonnegative(dark_rate), "dark_rate", "must be >= 0");
  require(finite_positive(cycle_duration), "cycle_duration", "must be > 0");
  require(finite_positive(detection_window), "detection_window", "must be > 0");
  require(finite_nonnegative(readout_duration), "readout_duration", "must be >= 0");
  require(detection_window + readout_duration <= cycle_duration * (1.0 + 1e-12),
          "detection_window", "detection_window + readout_duration must not exceed cycle_duration");
  require(finite_positive(bandwidth_fwhm), "bandwidth_fwhm", "must be > 0");
  require(finite_positive(saturation_flux), "saturation_flux", "must be > 0");
}

void FieldSetting::validate() const {
  require(finite_nonnegative(b0), "B0", "must be >= 0");
  require(std::isfinite(theta) && std::abs(theta) < constants::kPi / 2, "theta",
          "|theta| must be < pi/2");
  require(std::isfinite(beta), "beta", "must be finite");
}

void ProtocolParams::validate() const {
  require(finite_positive(t_d), "t_d", "must be > 0");
  require(finite_positive(t_r), "t_r", "must be > 0");
  require(std::isfinite(t_m), "t_m", "must be finite");
  require(t_d <= t_r, "t_d", "must not exceed t_r");
  require(t_r <= t_m, "t_r", "must not exceed t_m");
}

std::size_t ProtocolParams::sequences() const {
  return static_cast<std::size_t>(std::llround(t_m / t_r));
}

double CrystalModel::site_density() const noexcept {
  return sites_per_cell / (lattice_a * lattice_a * lattice_c);
}

double CrystalModel::box_volume() const noexcept {
  return detection_box.x * detection_box.y * detection_box.z;
}

double CrystalModel::mean_spin_count() const noexcept {
  return site_density() * er_concentration * box_volume();
}

void CrystalModel::validate() const {
  require(finite_positive(lattice_a), "lattice_a", "must be > 0");
  require(finite_positive(lattice_c), "lattice_c", "must be > 0");
  require(finite_positive(sites_per_cell), "sites_per_cell", "must be > 0");
  // Zero is accepted and yields an empty ensemble.
  require(std::isfinite(er_concentration) && er_concentration >= 0.0 && er_concentration < 1.0,
          "er_concentration", "must lie in [0, 1)");
  require(finite_positive(detection_box.x) && finite_positive(detection_box.y) &&
              finite_positive(detection_box.z),
          "detection_box", "extents must be > 0");
}

std::string_view to_string(LineShape s) {
  return s == LineShape::kLorentzian ? "lorentzian" : "gaussian";
}

LineShape line_shape_from_string(std::string_view s) {
  if (s == "lorentzian") return LineShape::kLorentzian;
  if (s == "gaussian") return LineShape::kGaussian;
  throw ValidationError("shape", fmt::format("unknown line shape '{}'", s));
}

void EnsembleSpec::validate() const {
  require(finite_nonnegative(linewidth_fwhm), "linewidth", "must be >= 0");
  require(finite_positive(truncation), "truncation", "must be > 0");
  require(finite_nonnegative(gamma_perp_spread), "gamma_perp_spread", "must be >= 0");
  require(finite_nonnegative(tilt_spread), "tilt_spread", "must be >= 0");
  require(finite_positive(t2_star_min) && t2_star_min <= t2_star_max, "t2_star_range",
          "needs 0 < min <= max");
  require(finite_positive(t2_echo_min) && t2_echo_min <= t2_echo_max, "t2_echo_range",
          "needs 0 < min <= max");
  require(t2_star_max <= t2_echo_min, "t2_star_range", "must lie below t2_echo_range");
}

void NonRadiativeReference::validate() const {
  require(finite_positive(t1), "reference_t1", "must be > 0");
  require(finite_positive(omega), "reference_frequency", "must be > 0");
}

void HeatingModel::validate() const {
  require(finite_nonnegative(amplitude), "heating.amplitude", "must be >= 0");
  require(finite_positive(decay_time), "heating.decay_time", "must be > 0");
  require(finite_nonnegative(offset_counts), "heating.offset_counts", "must be >= 0");
  require(finite_positive(buildup_time), "heating.buildup_time", "must be > 0");
}

}  // namespace spincount
