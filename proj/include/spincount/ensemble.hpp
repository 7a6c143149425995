#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "spincount/model.hpp"

namespace spincount {

/// Per-parameter widths used to draw tensor deviations. The gamma_parallel
/// width is solved for so that the resonance-field line has the target FWHM
/// once the (Gaussian) gamma_perp and tilt contributions are folded in.
struct LinewidthCalibration {
  double center_field = 0.0;           // T, resonance field of the mean tensor
  double gaussian_fwhm = 0.0;          // T, from gamma_perp and tilt spreads
  double parallel_fwhm = 0.0;          // T, assigned to the gamma_parallel draw
  double parallel_relative_hwhm = 0.0; // half width of gamma_parallel / mean
};

LinewidthCalibration calibrate_linewidth(const EnsembleSpec& spec, const ResonatorModel& resonator,
                                         const FieldSetting& field);

/// Draws a Poisson number of spins uniformly in the crystal detection box.
/// Deterministic in `seed`; spin i only depends on (seed, i).
std::vector<SpinCenter> sample_spin_ensemble(const CrystalModel& crystal, const EnsembleSpec& spec,
                                             const ResonatorModel& resonator,
                                             const FieldSetting& field,
                                             const NonRadiativeReference& nonradiative,
                                             std::uint64_t seed);

/// Resonance field of each spin at the given orientation and frequency.
std::vector<double> resonance_fields(const std::vector<SpinCenter>& spins, double theta,
                                     double beta, double omega);

/// One spin per row, SI units except gyromagnetic ratios in GHz/T.
void write_ensemble_csv(std::ostream& out, const std::vector<SpinCenter>& spins);

}  // namespace spincount
