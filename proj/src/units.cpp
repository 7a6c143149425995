#include "spincount/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fmt/format.h>

namespace spincount {

namespace {

struct UnitEntry {
  std::string_view suffix;
  double factor;
};

using constants::kTwoPi;

constexpr std::array kAngularUnits{
    UnitEntry{"rad/s", 1.0},       UnitEntry{"/s", 1.0},
    UnitEntry{"s^-1", 1.0},        UnitEntry{"1/s", 1.0},
    UnitEntry{"Hz", kTwoPi},       UnitEntry{"kHz", kTwoPi * 1e3},
    UnitEntry{"MHz", kTwoPi * 1e6}, UnitEntry{"GHz", kTwoPi * 1e9},
};
constexpr std::array kFrequencyUnits{
    UnitEntry{"Hz", 1.0}, UnitEntry{"kHz", 1e3}, UnitEntry{"MHz", 1e6}, UnitEntry{"GHz", 1e9}};
constexpr std::array kRateUnits{
    UnitEntry{"/s", 1.0},        UnitEntry{"s^-1", 1.0},        UnitEntry{"1/s", 1.0},
    UnitEntry{"counts/s", 1.0},  UnitEntry{"photons/s", 1.0},   UnitEntry{"/ms", 1e3},
};
constexpr std::array kTimeUnits{
    UnitEntry{"s", 1.0},   UnitEntry{"ms", 1e-3}, UnitEntry{"us", 1e-6},
    UnitEntry{"μs", 1e-6}, UnitEntry{"µs", 1e-6}, UnitEntry{"ns", 1e-9},
};
constexpr std::array kLengthUnits{
    UnitEntry{"m", 1.0},   UnitEntry{"mm", 1e-3}, UnitEntry{"um", 1e-6},
    UnitEntry{"μm", 1e-6}, UnitEntry{"µm", 1e-6}, UnitEntry{"nm", 1e-9},
};
constexpr std::array kFieldUnits{
    UnitEntry{"T", 1.0}, UnitEntry{"mT", 1e-3}, UnitEntry{"uT", 1e-6},
    UnitEntry{"μT", 1e-6}, UnitEntry{"µT", 1e-6},
};
constexpr std::array kGyroUnits{
    UnitEntry{"rad/s/T", 1.0}, UnitEntry{"GHz/T", kTwoPi * 1e9}, UnitEntry{"MHz/T", kTwoPi * 1e6}};
constexpr std::array kAngleUnits{
    UnitEntry{"rad", 1.0}, UnitEntry{"mrad", 1e-3},
    UnitEntry{"deg", constants::kPi / 180.0}, UnitEntry{"°", constants::kPi / 180.0}};
constexpr std::array kTemperatureUnits{UnitEntry{"K", 1.0}, UnitEntry{"mK", 1e-3}};
constexpr std::array kImpedanceUnits{
    UnitEntry{"ohm", 1.0}, UnitEntry{"Ohm", 1.0}, UnitEntry{"Ω", 1.0}};
constexpr std::array kDimensionlessUnits{
    UnitEntry{"", 1.0}, UnitEntry{"%", 1e-2}, UnitEntry{"ppm", 1e-6}, UnitEntry{"ppb", 1e-9}};

template <std::size_t N>
bool lookup(const std::array<UnitEntry, N>& table, std::string_view suffix, double& factor) {
  for (const auto& e : table) {
    if (e.suffix == suffix) {
      factor = e.factor;
      return true;
    }
  }
  return false;
}

bool unit_factor(Quantity q, std::string_view suffix, double& factor) {
  switch (q) {
    case Quantity::kDimensionless: return lookup(kDimensionlessUnits, suffix, factor);
    case Quantity::kAngularFrequency: return lookup(kAngularUnits, suffix, factor);
    case Quantity::kFrequency: return lookup(kFrequencyUnits, suffix, factor);
    case Quantity::kRate: return lookup(kRateUnits, suffix, factor);
    case Quantity::kTime: return lookup(kTimeUnits, suffix, factor);
    case Quantity::kLength: return lookup(kLengthUnits, suffix, factor);
    case Quantity::kMagneticField: return lookup(kFieldUnits, suffix, factor);
    case Quantity::kGyromagnetic: return lookup(kGyroUnits, suffix, factor);
    case Quantity::kAngle: return lookup(kAngleUnits, suffix, factor);
    case Quantity::kTemperature: return lookup(kTemperatureUnits, suffix, factor);
    case Quantity::kImpedance: return lookup(kImpedanceUnits, suffix, factor);
  }
  return false;
}

std::string_view canonical_unit(Quantity q) {
  switch (q) {
    case Quantity::kDimensionless: return "";
    case Quantity::kAngularFrequency: return "rad/s";
    case Quantity::kFrequency: return "Hz";
    case Quantity::kRate: return "/s";
    case Quantity::kTime: return "s";
    case Quantity::kLength: return "m";
    case Quantity::kMagneticField: return "T";
    case Quantity::kGyromagnetic: return "rad/s/T";
    case Quantity::kAngle: return "rad";
    case Quantity::kTemperature: return "K";
    case Quantity::kImpedance: return "ohm";
  }
  return "";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view quantity_name(Quantity q) {
  switch (q) {
    case Quantity::kDimensionless: return "dimensionless";
    case Quantity::kAngularFrequency: return "angular frequency";
    case Quantity::kFrequency: return "frequency";
    case Quantity::kRate: return "rate";
    case Quantity::kTime: return "time";
    case Quantity::kLength: return "length";
    case Quantity::kMagneticField: return "magnetic field";
    case Quantity::kGyromagnetic: return "gyromagnetic ratio";
    case Quantity::kAngle: return "angle";
    case Quantity::kTemperature: return "temperature";
    case Quantity::kImpedance: return "impedance";
  }
  return "?";
}

double parse_quantity(std::string_view text, Quantity q) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr == s.data()) {
    throw ConfigError(fmt::format("cannot parse number in '{}'", text));
  }
  const std::string_view suffix = trim(std::string_view(ptr, s.data() + s.size() - ptr));
  if (suffix.empty() && q != Quantity::kDimensionless) {
    throw ConfigError(
        fmt::format("'{}' needs an explicit unit suffix ({})", text, quantity_name(q)));
  }
  double factor = 1.0;
  if (!unit_factor(q, suffix, factor)) {
    throw ConfigError(fmt::format("unit '{}' is not valid for a {}", suffix, quantity_name(q)));
  }
  if (!std::isfinite(value)) throw ConfigError(fmt::format("non-finite value '{}'", text));
  return value * factor;
}

std::string format_quantity(double si_value, Quantity q) {
  const std::string_view unit = canonical_unit(q);
  if (unit.empty()) return fmt::format("{:.17g}", si_value);
  return fmt::format("{:.17g} {}", si_value, unit);
}

}  // namespace spincount
