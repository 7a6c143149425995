#include "spincount/ensemble.hpp"

#include <cmath>
#include <ostream>

#include <fmt/ostream.h>

#include "spincount/physics.hpp"
#include "spincount/rng.hpp"

namespace spincount {

namespace {

constexpr double kSigmaToFwhm = 2.3548200450309493;

double log_uniform(CounterRng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::exp(std::log(lo) + rng.uniform() * (std::log(hi) - std::log(lo)));
}

}  // namespace

LinewidthCalibration calibrate_linewidth(const EnsembleSpec& spec, const ResonatorModel& resonator,
                                         const FieldSetting& field) {
  LinewidthCalibration cal;
  const GyromagneticTensor mean;
  const auto bres = [&](const GyromagneticTensor& t) {
    return resonance_field(t, field.theta, field.beta, resonator.omega0);
  };
  cal.center_field = bres(mean);

  // Linearized Gaussian contributions from gamma_perp and the two tilts.
  const double h = 1e-6;
  GyromagneticTensor t = mean;
  t.gamma_perp *= 1.0 + h;
  const double d_perp = (bres(t) - cal.center_field) / h * spec.gamma_perp_spread;
  double var = d_perp * d_perp;
  for (int axis = 0; axis < 2; ++axis) {
    t = mean;
    (axis == 0 ? t.axis_tilt.a : t.axis_tilt.b) = h;
    const double plus = bres(t);
    (axis == 0 ? t.axis_tilt.a : t.axis_tilt.b) = -h;
    const double minus = bres(t);
    const double d = (plus - minus) / (2.0 * h) * spec.tilt_spread;
    var += d * d;
  }
  cal.gaussian_fwhm = kSigmaToFwhm * std::sqrt(var);

  const double target = spec.linewidth_fwhm;
  const double fg = cal.gaussian_fwhm;
  if (spec.shape == LineShape::kGaussian) {
    cal.parallel_fwhm = std::sqrt(std::max(0.0, target * target - fg * fg));
  } else {
    // Invert the Voigt width approximation f = 0.5346 fL + sqrt(0.2166 fL^2 + fG^2).
    double lo = 0.0;
    double hi = target;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double f = 0.5346 * mid + std::sqrt(0.2166 * mid * mid + fg * fg);
      (f < target ? lo : hi) = mid;
    }
    cal.parallel_fwhm = 0.5 * (lo + hi);
  }

  // d ln B / d ln gamma_parallel = -gamma_par^2 u^2 / gamma_eff^2.
  const double geff = effective_gamma(mean, field.theta, field.beta);
  const Vec3 b = field_direction(field.theta, field.beta);
  const Vec3 n = symmetry_axis(mean, field.beta);
  const double u = b.x * n.x + b.y * n.y + b.z * n.z;
  const double weight = mean.gamma_parallel * mean.gamma_parallel * u * u / (geff * geff);
  cal.parallel_relative_hwhm = weight > 0.0 ? 0.5 * cal.parallel_fwhm / cal.center_field / weight : 0.0;
  return cal;
}

std::vector<SpinCenter> sample_spin_ensemble(const CrystalModel& crystal, const EnsembleSpec& spec,
                                             const ResonatorModel& resonator,
                                             const FieldSetting& field,
                                             const NonRadiativeReference& nonradiative,
                                             std::uint64_t seed) {
  crystal.validate();
  spec.validate();
  const double mean_count = crystal.mean_spin_count();
  std::vector<SpinCenter> spins;
  if (!(mean_count > 0.0)) return spins;

  CounterRng count_rng(seed, 0, 0, StreamId::kEnsemble);
  const auto n = static_cast<std::size_t>(count_rng.poisson(mean_count));
  const LinewidthCalibration cal = calibrate_linewidth(spec, resonator, field);
  const Vec3 box = crystal.detection_box;
  spins.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(seed, 0, static_cast<std::uint32_t>(i + 1), StreamId::kEnsemble);
    SpinCenter s;
    s.id = static_cast<std::uint32_t>(i);
    s.position = {(rng.uniform() - 0.5) * box.x, rng.uniform_open_low() * box.y,
                  (rng.uniform() - 0.5) * box.z};
    double dev = 0.0;
    if (spec.shape == LineShape::kLorentzian) {
      dev = rng.truncated_cauchy(spec.truncation);
    } else {
      dev = rng.gaussian() / (kSigmaToFwhm / 2.0);  // unit half width at half maximum
    }
    // A larger gamma lowers the resonance field; the sign is immaterial for
    // the symmetric line.
    s.tensor.gamma_parallel *= std::max(0.05, 1.0 + cal.parallel_relative_hwhm * dev);
    s.tensor.gamma_perp *= std::max(0.05, 1.0 + spec.gamma_perp_spread * rng.gaussian());
    s.tensor.axis_tilt = {spec.tilt_spread * rng.gaussian(), spec.tilt_spread * rng.gaussian()};
    s.t2_star = log_uniform(rng, spec.t2_star_min, spec.t2_star_max);
    s.t2_echo = log_uniform(rng, spec.t2_echo_min, spec.t2_echo_max);
    s.t2_pdd = s.t2_echo;
    const double b = resonance_field(s.tensor, field.theta, field.beta, resonator.omega0);
    s.gamma_nr = nonradiative_rate(nonradiative, b, resonator.omega0);
    spins.push_back(s);
  }
  return spins;
}

std::vector<double> resonance_fields(const std::vector<SpinCenter>& spins, double theta,
                                     double beta, double omega) {
  std::vector<double> out;
  out.reserve(spins.size());
  for (const auto& s : spins) out.push_back(resonance_field(s.tensor, theta, beta, omega));
  return out;
}

void write_ensemble_csv(std::ostream& out, const std::vector<SpinCenter>& spins) {
  fmt::print(out,
             "id,x_m,y_m,z_m,gamma_parallel_GHz_per_T,gamma_perp_GHz_per_T,tilt_a_rad,tilt_b_rad,"
             "t2_star_s,t2_echo_s,gamma_nr_per_s\n");
  for (const auto& s : spins) {
    fmt::print(out, "{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.6g},{:.6g},{:.6g},{:.6g},{:.6g}\n", s.id,
               s.position.x, s.position.y, s.position.z,
               s.tensor.gamma_parallel / constants::kTwoPi / 1e9,
               s.tensor.gamma_perp / constants::kTwoPi / 1e9, s.tensor.axis_tilt.a,
               s.tensor.axis_tilt.b, s.t2_star, s.t2_echo, s.gamma_nr);
  }
}

}  // namespace spincount
