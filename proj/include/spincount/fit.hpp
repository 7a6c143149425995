#pragma once

#include <functional>
#include <string>
#include <vector>

namespace spincount {

struct FitResult {
  std::string model;
  std::vector<std::string> names;
  std::vector<double> params;
  std::vector<double> errors;  // 1 sigma from the curvature matrix
  double chi2 = 0.0;
  std::size_t dof = 0;
  double reduced_chi2 = 0.0;
  bool converged = false;
  // Weighted fits only: reduced chi2 above 3.
  bool model_mismatch = false;
  int iterations = 0;

  double operator[](std::size_t i) const { return params.at(i); }
  double param(const std::string& name) const;
  double error(const std::string& name) const;
};

using ModelFn = std::function<double(double x, const std::vector<double>& p)>;

/// Levenberg-Marquardt least squares. `sigma` may be empty (unit weights, and
/// errors rescaled by the reduced chi2). `scale` gives a typical magnitude
/// per parameter; `fixed` freezes parameters at their initial values.
FitResult least_squares(const ModelFn& model, const std::vector<double>& x,
                        const std::vector<double>& y, const std::vector<double>& sigma,
                        std::vector<double> initial, const std::vector<double>& scale,
                        const std::vector<bool>& fixed = {});

enum class DecayModel { kExponential, kGaussianDampedSine, kExpDampedSine, kSinePlusLinear };

/// Lorentzian: offset + amplitude / (1 + (2 (x - center) / fwhm)^2).
/// Parameters: center, fwhm, amplitude, offset.
FitResult fit_lorentzian_peak(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& sigma = {});
double lorentzian(double x, const std::vector<double>& p);

/// Parameters by model:
///   exponential: amplitude, tau, offset
///   gaussian-damped sine: amplitude, t2, frequency (Hz), phase, offset
///   exp-damped sine: amplitude, t2, frequency (Hz), phase, offset
///   sine plus linear: amplitude, frequency (Hz), phase, offset, slope
FitResult fit_decay(const std::vector<double>& t, const std::vector<double>& y, DecayModel model,
                    const std::vector<double>& sigma = {});
double decay_model(DecayModel model, double t, const std::vector<double>& p);
std::string to_string(DecayModel model);

/// T1(delta) = (delta^2 + kappa^2 / 4) / (kappa g0^2). Parameters: g0, kappa
/// (rad/s). Needs detunings on both sides of zero; a positive `kappa_fixed`
/// freezes kappa.
FitResult fit_purcell_detuning(const std::vector<double>& delta, const std::vector<double>& t1,
                               const std::vector<double>& sigma, double kappa_fixed);

/// Dominant frequency (cycles per unit x) of uniformly sampled data by a
/// zero-padded discrete Fourier scan of the mean-removed samples.
double dominant_frequency(const std::vector<double>& x, const std::vector<double>& y);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// y = a sqrt(x) through the origin; r_squared against the mean of y.
LinearFit fit_sqrt_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace spincount
