#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spincount/model.hpp"

namespace spincount {

enum class PowerMode { kHigh, kLow };

struct SpectroscopySettings {
  PowerMode power = PowerMode::kHigh;
  double b0_start = 0.41815;
  double b0_stop = 0.42115;
  std::size_t points = 61;
  double theta_start = 0.0;
  double theta_stop = 0.0;
  std::size_t theta_points = 1;
  // Sweep theta linearly along the B0 scan instead of as a second axis.
  bool theta_linked = false;
  std::size_t sequences = 100;
  double repetition = 0.4;
  double window = 0.2;
  double pulse_duration = 1e-6;
  // Low power: only spins whose on-resonance radiative rate exceeds this are driven.
  double low_power_threshold = 500.0;
  // Sweep the spins listed in the config instead of a sampled ensemble.
  bool use_config_spins = false;

  bool operator==(const SpectroscopySettings&) const = default;
};

struct RabiSettings {
  double duration_start = 0.0;
  double duration_stop = 4e-6;
  std::size_t points = 41;
  std::vector<double> amplitudes{1.0};
  double rabi_coeff = constants::kTwoPi * 0.5e6;  // rad/s per unit amplitude
  std::size_t sequences = 20000;
  double repetition = 10e-3;
  double window = 4e-3;

  bool operator==(const RabiSettings&) const = default;
};

struct CoherenceSettings {
  double tau_start = 0.0;
  double tau_stop = 400e-6;
  std::size_t points = 41;
  double phase_ramp = 25e3;  // Hz
  double pulse_duration = 0.5e-6;  // pi/2 pulse; pi pulses last twice as long
  int detuning_sign = +1;
  std::size_t sequences = 20000;
  double repetition = 10e-3;
  double window = 4e-3;

  bool operator==(const CoherenceSettings&) const = default;
};

struct T1Settings {
  std::size_t sequences = 100000;
  double repetition = 10e-3;
  double bin_width = 50e-6;
  double exclusion = 50e-6;
  std::vector<double> detunings{0.0};  // rad/s, spin minus resonator
  bool fit_kappa = false;

  bool operator==(const T1Settings&) const = default;
};

struct G2Settings {
  std::size_t sequences = 100000;
  double repetition = 7.5e-3;
  double exclusion = 100e-6;
  double bin_width = 350e-6;
  std::size_t bins = 21;
  std::size_t max_lag = 10;
  std::size_t bootstrap = 200;
  std::size_t emitters = 1;

  bool operator==(const G2Settings&) const = default;
};

struct SnrSettings {
  std::vector<double> measurement_times{1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 60.0};
  double total_time = 3600.0;

  bool operator==(const SnrSettings&) const = default;
};

struct OptimizeSettings {
  double t_min = 10e-6;
  double t_max = 1.0;
  std::size_t grid = 64;
  double tolerance = 1e-4;

  bool operator==(const OptimizeSettings&) const = default;
};

struct VolumeSettings {
  double threshold = 500.0;
  double base_grid = 5e-9;

  bool operator==(const VolumeSettings&) const = default;
};

struct GmapSettings {
  double x_min = -1e-6;
  double x_max = 1e-6;
  double y_min = 0.0;
  double y_max = 1e-6;
  std::size_t nx = 201;
  std::size_t ny = 101;

  bool operator==(const GmapSettings&) const = default;
};

/// Everything a run needs, validated. Built from a JSON document whose values
/// carry explicit unit suffixes ("7.335 GHz", "470 kHz", "2 ms").
struct ExperimentConfig {
  ResonatorModel resonator;
  DetectorModel detector;
  FieldSetting field;
  ProtocolParams protocol;
  CrystalModel crystal;
  EnsembleSpec ensemble;
  HeatingModel heating;
  NonRadiativeReference nonradiative;
  std::vector<SpinCenter> spins;
  std::optional<std::string> field_map;

  SpectroscopySettings spectroscopy;
  RabiSettings rabi;
  CoherenceSettings ramsey;
  CoherenceSettings hahn{0.0, 3e-3, 31, 1e3, 0.5e-6, +1, 20000, 20e-3, 4e-3};
  CoherenceSettings pdd{0.0, 1.5e-3, 31, 1e3, 0.5e-6, +1, 20000, 20e-3, 4e-3};
  T1Settings t1;
  G2Settings g2;
  SnrSettings snr;
  OptimizeSettings optimize;
  VolumeSettings volume;
  GmapSettings gmap;

  void validate() const;
  const SpinCenter& spin(std::uint32_t id) const;  // throws std::out_of_range
  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates a configuration document. Omitted keys take their
/// documented defaults; unknown keys are errors. Throws ConfigError for
/// malformed text and ValidationError naming the violated field.
ExperimentConfig load_experiment_config(std::string_view text);
ExperimentConfig load_experiment_config_file(const std::string& path);

/// Canonical SI rendering; load_experiment_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// 64-bit FNV-1a over the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);
std::string fnv1a_hex(std::string_view bytes);

}  // namespace spincount
