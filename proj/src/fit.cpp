#include "spincount/fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

namespace spincount {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Problem : Eigen::DenseFunctor<double> {
  Problem(const ModelFn& model, const std::vector<double>& x, const std::vector<double>& y,
          const std::vector<double>& sigma, const std::vector<double>& base,
          const std::vector<double>& scale, const std::vector<std::size_t>& free)
      : Eigen::DenseFunctor<double>(static_cast<int>(free.size()), static_cast<int>(x.size())),
        model_(model), x_(x), y_(y), sigma_(sigma), base_(base), scale_(scale), free_(free) {}

  std::vector<double> expand(const InputType& q) const {
    std::vector<double> p = base_;
    for (std::size_t k = 0; k < free_.size(); ++k) p[free_[k]] = q[static_cast<Eigen::Index>(k)] * scale_[free_[k]];
    return p;
  }

  int operator()(const InputType& q, ValueType& f) const {
    const std::vector<double> p = expand(q);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double s = sigma_.empty() ? 1.0 : sigma_[i];
      double r = (y_[i] - model_(x_[i], p)) / s;
      if (!std::isfinite(r)) r = 1e150;
      f[static_cast<Eigen::Index>(i)] = r;
    }
    return 0;
  }

  int df(const InputType& q, JacobianType& jac) const {
    ValueType fp(values()), fm(values());
    InputType qq = q;
    for (Eigen::Index k = 0; k < q.size(); ++k) {
      const double h = 1e-7 * std::max(1.0, std::abs(q[k]));
      qq[k] = q[k] + h;
      (*this)(qq, fp);
      qq[k] = q[k] - h;
      (*this)(qq, fm);
      qq[k] = q[k];
      jac.col(k) = (fp - fm) / (2.0 * h);
    }
    return 0;
  }

  const ModelFn& model_;
  const std::vector<double>& x_;
  const std::vector<double>& y_;
  const std::vector<double>& sigma_;
  std::vector<double> base_;
  std::vector<double> scale_;
  std::vector<std::size_t> free_;
};

FitResult best_of(std::vector<FitResult> fits) {
  FitResult best;
  double best_chi2 = std::numeric_limits<double>::infinity();
  for (auto& f : fits) {
    const bool better = (f.converged && !best.converged) ||
                        (f.converged == best.converged && f.chi2 < best_chi2);
    if (better) {
      best_chi2 = f.chi2;
      best = std::move(f);
    }
  }
  return best;
}

double mean_of(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) s += v[i];
  return hi > lo ? s / static_cast<double>(hi - lo) : 0.0;
}

void require_points(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_points) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  if (x.size() < min_points) {
    throw std::invalid_argument("fit needs at least " + std::to_string(min_points) + " points");
  }
}

}  // namespace

double FitResult::param(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range("no fit parameter " + name);
  return params[static_cast<std::size_t>(it - names.begin())];
}

double FitResult::error(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range("no fit parameter " + name);
  return errors[static_cast<std::size_t>(it - names.begin())];
}

FitResult least_squares(const ModelFn& model, const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& sigma, std::vector<double> initial,
                        const std::vector<double>& scale, const std::vector<bool>& fixed) {
  if (x.size() != y.size() || (!sigma.empty() && sigma.size() != y.size())) {
    throw std::invalid_argument("least_squares: size mismatch");
  }
  for (double s : sigma) {
    if (!(s > 0.0)) throw std::invalid_argument("least_squares: sigma must be > 0");
  }
  std::vector<std::size_t> free;
  for (std::size_t k = 0; k < initial.size(); ++k) {
    if (fixed.empty() || !fixed[k]) free.push_back(k);
  }
  if (x.size() < free.size() + 1) throw std::invalid_argument("least_squares: too few points");

  std::vector<double> sc(initial.size());
  for (std::size_t k = 0; k < sc.size(); ++k) {
    sc[k] = k < scale.size() && scale[k] != 0.0 ? std::abs(scale[k])
                                                : std::max(std::abs(initial[k]), 1e-300);
  }
  Problem problem(model, x, y, sigma, initial, sc, free);
  Eigen::VectorXd q(static_cast<Eigen::Index>(free.size()));
  for (std::size_t k = 0; k < free.size(); ++k) q[static_cast<Eigen::Index>(k)] = initial[free[k]] / sc[free[k]];

  Eigen::LevenbergMarquardt<Problem> lm(problem);
  lm.setMaxfev(400 * static_cast<Eigen::Index>(free.size() + 1));
  lm.setXtol(1e-12);
  lm.setFtol(1e-14);
  const auto status = lm.minimize(q);

  FitResult r;
  r.params = problem.expand(q);
  r.iterations = static_cast<int>(lm.iterations());
  Eigen::VectorXd f(static_cast<Eigen::Index>(x.size()));
  problem(q, f);
  r.chi2 = f.squaredNorm();
  r.dof = x.size() - free.size();
  r.reduced_chi2 = r.chi2 / static_cast<double>(r.dof);
  using namespace Eigen::LevenbergMarquardtSpace;
  r.converged = status != ImproperInputParameters && status != TooManyFunctionEvaluation &&
                std::all_of(r.params.begin(), r.params.end(), [](double v) { return std::isfinite(v); });

  Eigen::MatrixXd jac(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(free.size()));
  problem.df(q, jac);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::MatrixXd cov = jtj.completeOrthogonalDecomposition().pseudoInverse();
  if (sigma.empty()) cov *= r.reduced_chi2;
  r.errors.assign(initial.size(), 0.0);
  for (std::size_t k = 0; k < free.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    r.errors[free[k]] = std::sqrt(std::max(0.0, cov(kk, kk))) * sc[free[k]];
  }
  r.model_mismatch = !sigma.empty() && r.reduced_chi2 > 3.0;
  return r;
}

double lorentzian(double x, const std::vector<double>& p) {
  const double u = 2.0 * (x - p[0]) / p[1];
  return p[3] + p[2] / (1.0 + u * u);
}

FitResult fit_lorentzian_peak(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& sigma) {
  require_points(x, y, 5);
  const auto imax = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end());
  const double offset = sorted[sorted.size() / 4];
  const double amp = y[imax] - offset;
  // Half-power width around the maximum.
  const double half = offset + 0.5 * amp;
  std::size_t lo = imax, hi = imax;
  while (lo > 0 && y[lo] > half) --lo;
  while (hi + 1 < y.size() && y[hi] > half) ++hi;
  const double span = std::abs(x.back() - x.front());
  double width = std::abs(x[hi] - x[lo]);
  if (!(width > 0.0)) width = span / 10.0;
  const double yscale = std::max(std::abs(amp), 1e-12);
  FitResult fit = least_squares(lorentzian, x, y, sigma, {x[imax], width, amp, offset},
                                {width, width, yscale, yscale});
  fit.model = "lorentzian";
  fit.names = {"center", "fwhm", "amplitude", "offset"};
  fit.params[1] = std::abs(fit.params[1]);
  if (fit.params[1] > 10.0 * span) fit.converged = false;
  return fit;
}

std::string to_string(DecayModel model) {
  switch (model) {
    case DecayModel::kExponential: return "exponential";
    case DecayModel::kGaussianDampedSine: return "gaussian-damped-sine";
    case DecayModel::kExpDampedSine: return "exp-damped-sine";
    case DecayModel::kSinePlusLinear: return "sine-plus-linear";
  }
  return "?";
}

double decay_model(DecayModel model, double t, const std::vector<double>& p) {
  switch (model) {
    case DecayModel::kExponential:
      return p[0] * std::exp(-t / p[1]) + p[2];
    case DecayModel::kGaussianDampedSine:
      return p[0] * std::exp(-(t / p[1]) * (t / p[1])) * std::cos(2.0 * kPi * p[2] * t + p[3]) + p[4];
    case DecayModel::kExpDampedSine:
      return p[0] * std::exp(-t / p[1]) * std::cos(2.0 * kPi * p[2] * t + p[3]) + p[4];
    case DecayModel::kSinePlusLinear:
      return p[0] * std::sin(2.0 * kPi * p[1] * t + p[2]) + p[3] + p[4] * t;
  }
  return 0.0;
}

double dominant_frequency(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 4) return 0.0;
  const double dt = (x.back() - x.front()) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) return 0.0;
  const double mean = mean_of(y, 0, n);
  const std::size_t steps = 8 * n;
  const double f_max = 0.5 / dt;
  double best_f = 0.0, best_p = -1.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double f = f_max * static_cast<double>(k) / static_cast<double>(steps);
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (y[i] - mean) * std::polar(1.0, -2.0 * kPi * f * x[i]);
    if (std::norm(acc) > best_p) {
      best_p = std::norm(acc);
      best_f = f;
    }
  }
  return best_f;
}

FitResult fit_decay(const std::vector<double>& t, const std::vector<double>& y, DecayModel model,
                    const std::vector<double>& sigma) {
  require_points(t, y, 8);
  const std::size_t n = t.size();
  const double span = t.back() - t.front();
  const double y_range = *std::max_element(y.begin(), y.end()) - *std::min_element(y.begin(), y.end());
  const double yscale = std::max(y_range, 1e-12);
  const ModelFn fn = [model](double x, const std::vector<double>& p) { return decay_model(model, x, p); };
  std::vector<FitResult> fits;
  std::vector<std::string> names;

  if (model == DecayModel::kExponential) {
    const double offset = mean_of(y, n - std::max<std::size_t>(1, n / 5), n);
    const double a0 = y.front() - offset;
    double tau = span / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(y[i] - offset) <= std::abs(a0) / std::exp(1.0)) {
        tau = std::max(t[i] - t.front(), span / static_cast<double>(n));
        break;
      }
    }
    const double amp = a0 * std::exp(t.front() / tau);
    fits.push_back(least_squares(fn, t, y, sigma, {amp, tau, offset}, {yscale, tau, yscale}));
    names = {"amplitude", "tau", "offset"};
  } else if (model == DecayModel::kSinePlusLinear) {
    // Detrend, then seed the oscillation from the spectrum.
    const double tm = mean_of(t, 0, n);
    const double ym = mean_of(y, 0, n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxy += (t[i] - tm) * (y[i] - ym);
      sxx += (t[i] - tm) * (t[i] - tm);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - ym - slope * (t[i] - tm);
    const double f = dominant_frequency(t, resid);
    const double amp = 0.5 * (*std::max_element(resid.begin(), resid.end()) -
                              *std::min_element(resid.begin(), resid.end()));
    for (double phase : {0.0, 0.5 * kPi, kPi, 1.5 * kPi}) {
      fits.push_back(least_squares(fn, t, y, sigma, {amp, f, phase, ym - slope * tm, slope},
                                   {yscale, std::max(f, 1.0 / span), 1.0, yscale, yscale / span}));
    }
    names = {"amplitude", "frequency", "phase", "offset", "slope"};
  } else {
    const double offset = mean_of(y, 0, n);
    const double f = dominant_frequency(t, y);
    const double amp = 0.5 * y_range;
    for (double t2 : {span / 3.0, span}) {
      for (double phase : {0.0, 0.5 * kPi, kPi, 1.5 * kPi}) {
        fits.push_back(least_squares(fn, t, y, sigma, {amp, t2, f, phase, offset},
                                     {yscale, span, std::max(f, 1.0 / span), 1.0, yscale}));
      }
    }
    names = {"amplitude", "t2", "frequency", "phase", "offset"};
  }
  FitResult best = best_of(std::move(fits));
  best.model = to_string(model);
  best.names = names;
  if (model != DecayModel::kSinePlusLinear) best.params[1] = std::abs(best.params[1]);
  return best;
}

FitResult fit_purcell_detuning(const std::vector<double>& delta, const std::vector<double>& t1,
                               const std::vector<double>& sigma, double kappa_fixed) {
  require_points(delta, t1, 2);
  const bool below = std::any_of(delta.begin(), delta.end(), [](double d) { return d < 0.0; });
  const bool above = std::any_of(delta.begin(), delta.end(), [](double d) { return d > 0.0; });
  if (!below || !above) throw std::invalid_argument("insufficient detuning range: need points on both sides of zero");
  const bool freeze = kappa_fixed > 0.0;
  if (!freeze && delta.size() < 3) throw std::invalid_argument("fitting kappa needs at least three detunings");

  // Seed from the parabola T1 = a + b delta^2.
  double s1 = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const double u = delta[i] * delta[i];
    s1 += 1;
    sx += u;
    sy += t1[i];
    sxx += u * u;
    sxy += u * t1[i];
  }
  const double det = s1 * sxx - sx * sx;
  double b = det != 0.0 ? (s1 * sxy - sx * sy) / det : 0.0;
  double a = det != 0.0 ? (sy - b * sx) / s1 : sy / s1;
  double kappa = freeze ? kappa_fixed : (a > 0.0 && b > 0.0 ? 2.0 * std::sqrt(a / b) : 3e6);
  const double tmin = *std::min_element(t1.begin(), t1.end());
  double g0 = freeze || !(b > 0.0) ? std::sqrt(kappa / (4.0 * tmin)) : std::sqrt(1.0 / (b * kappa));

  const ModelFn fn = [](double d, const std::vector<double>& p) {
    return (d * d + 0.25 * p[1] * p[1]) / (p[1] * p[0] * p[0]);
  };
  FitResult fit = least_squares(fn, delta, t1, sigma, {g0, kappa}, {g0, kappa}, {false, freeze});
  fit.model = "purcell-detuning";
  fit.names = {"g0", "kappa"};
  fit.params[0] = std::abs(fit.params[0]);
  fit.params[1] = std::abs(fit.params[1]);
  return fit;
}

LinearFit fit_sqrt_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("sqrt fit needs >= 2 points");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += y[i] * std::sqrt(x[i]);
    den += x[i];
  }
  LinearFit f;
  f.slope = num / den;
  const double ym = mean_of(y, 0, y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.slope * std::sqrt(x[i]);
    ss_res += r * r;
    ss_tot += (y[i] - ym) * (y[i] - ym);
  }
  f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  return f;
}

}  // namespace spincount
