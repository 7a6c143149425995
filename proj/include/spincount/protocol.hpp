#pragma once

#include <vector>

#include "spincount/model.hpp"

namespace spincount {

class FieldMap;

struct SnrInputs {
  double gamma_r = 700.0;
  double alpha = 100.0;
  double eta = 0.12;
  ProtocolParams params;

  void validate() const;
};

/// C_spin = eta (t_m / t_r) tanh(Gamma_R t_r / 2) (1 - exp(-Gamma_R t_d)).
double expected_signal(const SnrInputs& in);

/// C_spin / sqrt(alpha t_d t_m / t_r + (1 - eta) C_spin). Infinite when the
/// noise vanishes with a signal present; throws std::domain_error for 0/0.
double snr(const SnrInputs& in);

/// Approximate form eta Gamma_R / sqrt(alpha + eta (1 - eta) Gamma_R), in
/// units of 1/sqrt(s).
double snr_scaling(double gamma_r, double alpha, double eta);

struct OptimizeBounds {
  double t_min = 10e-6;
  double t_max = 1.0;
  std::size_t grid = 64;
  double tolerance = 1e-4;
};

struct OptimizeResult {
  double t_d = 0.0;
  double t_r = 0.0;
  double snr = 0.0;
  bool refined = false;     // local search improved on the grid point
  bool unimodal = true;     // SNR(t_d) unimodal along every grid row
  std::vector<double> axis; // grid coordinates, shared by t_d and t_r
  std::vector<double> grid; // SNR[i_r * n + i_d]; NaN where t_d > t_r
};

/// Log-grid scan of (t_d, t_r) with t_d <= t_r followed by Nelder-Mead in
/// log coordinates. Throws std::invalid_argument for an empty feasible set.
OptimizeResult optimize_protocol(double gamma_r, double alpha, double eta, double t_m,
                                 const OptimizeBounds& bounds = {});

struct VolumeResult {
  double area = 0.0;    // m^2 in the (x, y) half plane y >= 0
  double volume = 0.0;  // area * wire length
  double extent = 0.0;  // half width of the integration box
};

/// Region below the chip where the on-resonance radiative rate of a spin
/// with `gamma_perp` reaches `threshold`, by adaptive subdivision of a
/// `base_grid` mesh.
VolumeResult detection_volume(const ResonatorModel& resonator, double threshold,
                              double base_grid = 5e-9,
                              double gamma_perp = constants::kGammaPerp,
                              const FieldMap* map = nullptr);

}  // namespace spincount
