#pragma once
// Reference computations written independently of the library, used to
// cross-check it. Kept deliberately naive.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kKb = 1.380649e-23;

inline double snr(double gamma, double alpha, double eta, double t_d, double t_r, double t_m) {
  const double c = eta * t_m / t_r * std::tanh(gamma * t_r / 2) * (1 - std::exp(-gamma * t_d));
  return c / std::sqrt(alpha * t_d * t_m / t_r + (1 - eta) * c);
}

inline double purcell(double g0, double delta, double kappa) {
  return kappa * g0 * g0 / (delta * delta + kappa * kappa / 4);
}

// Bose-Einstein occupation from the geometric series sum_{n>=1} exp(-n x).
inline double occupancy(double omega, double temperature) {
  const double x = kHbar * omega / (kKb * temperature);
  double sum = 0.0;
  for (int n = 1; n < 200; ++n) {
    const double term = std::exp(-n * x);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// Temperature for a target occupancy by bisection on `occupancy`.
inline double temperature(double omega, double n) {
  double lo = 1e-4, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (occupancy(omega, mid) < n ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

// Spin-1/2 propagators as 2x2 complex matrices, for pulse-sequence checks.
using C = std::complex<double>;
using M2 = std::array<C, 4>;  // row-major

inline M2 mul(const M2& a, const M2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

// exp(-i (theta/2) n.sigma) for n in the xy plane at angle phi, tilted by the
// detuning: the effective field is (Omega cos phi, Omega sin phi, delta).
inline M2 rotation(double omega, double delta, double phi, double t) {
  const double w = std::sqrt(omega * omega + delta * delta);
  if (w == 0.0) return {1, 0, 0, 1};
  const double nx = omega * std::cos(phi) / w, ny = omega * std::sin(phi) / w, nz = delta / w;
  const double c = std::cos(w * t / 2), s = std::sin(w * t / 2);
  const C i(0, 1);
  return {C(c, 0) - i * s * nz, -i * s * C(nx, -ny), -i * s * C(nx, ny), C(c, 0) + i * s * nz};
}

// Free precession by angle `phase` about z.
inline M2 precession(double phase) {
  const C i(0, 1);
  return {std::exp(-i * phase / 2.0), 0, 0, std::exp(i * phase / 2.0)};
}

// Excited-state population after applying `u` to the ground state |0>,
// with |1> the excited state.
inline double excited(const M2& u) { return std::norm(u[2]); }

// Plain O(N * bins) estimators.
inline double g2_pair(const std::vector<std::vector<int>>& n, std::size_t a, std::size_t b, int lag) {
  double sab = 0, sa = 0, sb = 0;
  const std::size_t N = n.size();
  std::size_t m = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const long j = static_cast<long>(i) + lag;
    if (j < 0 || j >= static_cast<long>(N)) continue;
    sab += n[i][a] * n[j][b];
    ++m;
  }
  for (std::size_t i = 0; i < N; ++i) {
    sa += n[i][a];
    sb += n[i][b];
  }
  return (sab / m) / ((sa / N) * (sb / N));
}

inline double poisson_pmf(double mean, int k) {
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

}  // namespace oracle
