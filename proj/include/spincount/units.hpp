#pragma once

#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spincount {

namespace constants {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHbar = 1.054571817e-34;     // J s
inline constexpr double kPlanck = 6.62607015e-34;    // J s
inline constexpr double kBoltzmann = 1.380649e-23;   // J / K
inline constexpr double kMu0 = 1.25663706212e-6;     // T m / A

// Ensemble-mean Er:CaWO4 gyromagnetic ratios (rad s^-1 T^-1).
inline constexpr double kGammaParallel = kTwoPi * 17.45e9;
inline constexpr double kGammaPerp = kTwoPi * 117.3e9;

}  // namespace constants

/// Raised for malformed configuration text or values with bad units.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a value parses but violates a type invariant. `field()` names
/// the offending key.
class ValidationError : public ConfigError {
 public:
  ValidationError(std::string field, const std::string& what)
      : ConfigError(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Physical kind of a configuration value; selects the accepted unit suffixes.
///
/// Internal storage is SI with angular frequencies in rad/s. Suffixes in the
/// Hz family denote cyclic frequency and are multiplied by 2*pi whenever the
/// target kind is angular. Rates (counts or photons per second) never accept
/// Hz, so a 2*pi can only enter through an explicit frequency.
enum class Quantity {
  kDimensionless,
  kAngularFrequency,  // rad/s
  kFrequency,         // Hz (cyclic)
  kRate,              // 1/s
  kTime,              // s
  kLength,            // m
  kMagneticField,     // T
  kGyromagnetic,      // rad s^-1 T^-1
  kAngle,             // rad
  kTemperature,       // K
  kImpedance,         // ohm
};

std::string_view quantity_name(Quantity q);

/// Parses "<number> <unit>" into SI. Dimensionless values may be bare numbers
/// or carry %, ppm, ppb.
double parse_quantity(std::string_view text, Quantity q);

/// Canonical lossless SI rendering, e.g. "4.6087e+10 rad/s".
std::string format_quantity(double si_value, Quantity q);

}  // namespace spincount
