#include "spincount/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "spincount/field_map.hpp"
#include "spincount/physics.hpp"

namespace spincount {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Objective {
  double gamma_r, alpha, eta, t_m, t_min, t_max;

  double operator()(double t_d, double t_r) const {
    // exp(log(t)) can land an ulp past the bounds
    t_r = std::min(t_r, t_m);
    t_d = std::min(t_d, t_r);
    SnrInputs in{gamma_r, alpha, eta, {t_r, t_d, t_m}};
    const double c = expected_signal(in);
    const double noise = alpha * t_d * t_m / t_r + (1.0 - eta) * c;
    return noise > 0.0 ? c / std::sqrt(noise) : 0.0;
  }
};

double nm_cost(const gsl_vector* v, void* params) {
  const auto* obj = static_cast<const Objective*>(params);
  const double ld = gsl_vector_get(v, 0);
  const double lr = gsl_vector_get(v, 1);
  const double lo = std::log(obj->t_min);
  const double hi = std::log(obj->t_max);
  // Quadratic penalty outside the feasible set keeps the simplex inside.
  double penalty = 0.0;
  for (double u : {ld, lr}) {
    if (u < lo) penalty += (lo - u) * (lo - u);
    if (u > hi) penalty += (u - hi) * (u - hi);
  }
  if (ld > lr) penalty += (ld - lr) * (ld - lr);
  if (penalty > 0.0) return 1e3 * (1.0 + penalty);
  return -(*obj)(std::exp(ld), std::exp(lr));
}

bool row_unimodal(const std::vector<double>& v) {
  // Values may rise, then fall; a rise after a fall breaks unimodality.
  bool falling = false;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double d = v[i] - v[i - 1];
    const double tol = 1e-12 * std::max(std::abs(v[i]), 1.0);
    if (d < -tol) falling = true;
    if (d > tol && falling) return false;
  }
  return true;
}

}  // namespace

void SnrInputs::validate() const {
  if (!(gamma_r >= 0.0) || !(alpha >= 0.0) || !(eta >= 0.0) || eta > 1.0) {
    throw std::invalid_argument("SNR inputs need gamma_r, alpha >= 0 and 0 <= eta <= 1");
  }
  params.validate();
}

double expected_signal(const SnrInputs& in) {
  in.validate();
  const auto& p = in.params;
  return in.eta * (p.t_m / p.t_r) * std::tanh(0.5 * in.gamma_r * p.t_r) *
         (-std::expm1(-in.gamma_r * p.t_d));
}

double snr(const SnrInputs& in) {
  const double c = expected_signal(in);
  const auto& p = in.params;
  const double noise = in.alpha * p.t_d * p.t_m / p.t_r + (1.0 - in.eta) * c;
  if (noise <= 0.0) {
    if (c > 0.0) return std::numeric_limits<double>::infinity();
    throw std::domain_error("SNR undefined: no signal and no noise");
  }
  return c / std::sqrt(noise);
}

double snr_scaling(double gamma_r, double alpha, double eta) {
  const double den = alpha + eta * (1.0 - eta) * gamma_r;
  if (den <= 0.0) {
    if (eta * gamma_r > 0.0) return std::numeric_limits<double>::infinity();
    throw std::domain_error("SNR undefined: no signal and no noise");
  }
  return eta * gamma_r / std::sqrt(den);
}

OptimizeResult optimize_protocol(double gamma_r, double alpha, double eta, double t_m,
                                 const OptimizeBounds& bounds) {
  const double t_hi = std::min(bounds.t_max, t_m);
  if (!(bounds.t_min > 0.0) || !(t_hi > bounds.t_min) || bounds.grid < 2) {
    throw std::invalid_argument("empty feasible set for (t_d, t_r)");
  }
  const Objective obj{gamma_r, alpha, eta, t_m, bounds.t_min, t_hi};
  const std::size_t n = bounds.grid;
  OptimizeResult r;
  r.axis.resize(n);
  const double l0 = std::log(bounds.t_min);
  const double l1 = std::log(t_hi);
  for (std::size_t i = 0; i < n; ++i) {
    r.axis[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  r.grid.assign(n * n, kNaN);
  std::size_t best_d = 0, best_r = 0;
  double best = -1.0;
  for (std::size_t ir = 0; ir < n; ++ir) {
    std::vector<double> row;
    for (std::size_t id = 0; id <= ir; ++id) {
      const double v = obj(r.axis[id], r.axis[ir]);
      r.grid[ir * n + id] = v;
      row.push_back(v);
      if (v > best) {
        best = v;
        best_d = id;
        best_r = ir;
      }
    }
    if (!row_unimodal(row)) r.unimodal = false;
  }
  r.t_d = r.axis[best_d];
  r.t_r = r.axis[best_r];
  r.snr = best;
  if (!r.unimodal) return r;  // the grid optimum stands

  gsl_multimin_function fn{&nm_cost, 2, const_cast<Objective*>(&obj)};
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  gsl_vector_set(x, 0, std::log(r.t_d));
  gsl_vector_set(x, 1, std::log(r.t_r));
  const double h = (l1 - l0) / static_cast<double>(n - 1);
  gsl_vector_set_all(step, h);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_multimin_fminimizer_set(s, &fn, x, step);
  for (int iter = 0; iter < 2000; ++iter) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), bounds.tolerance) == GSL_SUCCESS) break;
  }
  const double val = -s->fval;
  if (val > r.snr) {
    r.t_d = std::exp(gsl_vector_get(s->x, 0));
    r.t_r = std::exp(gsl_vector_get(s->x, 1));
    r.snr = val;
    r.refined = true;
  }
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(x);
  gsl_vector_free(step);
  return r;
}

VolumeResult detection_volume(const ResonatorModel& resonator, double threshold, double base_grid,
                              double gamma_perp, const FieldMap* map) {
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be > 0");
  if (!(base_grid > 0.0)) throw std::invalid_argument("base grid must be > 0");
  const double kappa = resonator.kappa();
  const auto inside = [&](double x, double y) {
    double b1 = 0.0;
    if (map) {
      b1 = map->value(x, y);
    } else {
      b1 = vacuum_field(resonator, x == 0.0 && y == 0.0 ? 1e-30 : x, y);
    }
    return purcell_rate(coupling_from_field(gamma_perp, b1), 0.0, kappa) >= threshold;
  };

  // Grow the box until its boundary is free of the region.
  double w = 16.0 * base_grid;
  const auto boundary_hit = [&](double half) {
    const int m = 64;
    for (int i = 0; i <= m; ++i) {
      const double u = -half + 2.0 * half * i / m;
      const double v = half * i / m;
      if (inside(u, half) || inside(-half, v) || inside(half, v)) return true;
    }
    return false;
  };
  while (boundary_hit(w) && w < 1e-3) w *= 2.0;

  VolumeResult out;
  out.extent = w;
  const auto nx = static_cast<std::size_t>(std::ceil(2.0 * w / base_grid));
  const auto ny = static_cast<std::size_t>(std::ceil(w / base_grid));
  const double hx = 2.0 * w / static_cast<double>(nx);
  const double hy = w / static_cast<double>(ny);

  // Cells with mixed corners are split up to four times, then sampled at the center.
  const std::function<double(double, double, double, double, int)> cell =
      [&](double x0, double y0, double dx, double dy, int depth) -> double {
    const int hits = inside(x0, y0) + inside(x0 + dx, y0) + inside(x0, y0 + dy) + inside(x0 + dx, y0 + dy);
    if (hits == 4) return dx * dy;
    if (depth == 0) {
      if (hits == 0) return 0.0;
      return inside(x0 + 0.5 * dx, y0 + 0.5 * dy) ? dx * dy : 0.0;
    }
    if (hits == 0 && depth < 4) return 0.0;
    double sum = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) sum += cell(x0 + i * 0.5 * dx, y0 + j * 0.5 * dy, 0.5 * dx, 0.5 * dy, depth - 1);
    }
    return sum;
  };
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      out.area += cell(-w + static_cast<double>(i) * hx, static_cast<double>(j) * hy, hx, hy, 4);
    }
  }
  out.volume = out.area * resonator.wire_length;
  return out;
}

}  // namespace spincount
