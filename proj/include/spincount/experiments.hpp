#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spincount/analysis.hpp"
#include "spincount/config.hpp"
#include "spincount/engine.hpp"
#include "spincount/fit.hpp"
#include "spincount/g2.hpp"
#include "spincount/protocol.hpp"

namespace spincount {

class FieldMap;

struct RunOptions {
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  const FieldMap* field_map = nullptr;
};

/// Spins for a spectroscopy sweep: the listed ones, or a sampled ensemble.
std::vector<SpinCenter> experiment_spins(const ExperimentConfig& config, std::uint64_t seed);

/// Field setting that puts `spin` at detuning `delta` from the resonator, at
/// the configured angles.
FieldSetting tuned_field(const ExperimentConfig& config, const SpinCenter& spin, double delta = 0.0);

/// Rates and efficiency of one spin tuned to the resonator.
struct SpinSummary {
  SpinRates rates;
  RateBreakdown efficiency;
  FieldSetting field;
};
SpinSummary summarize_spin(const ExperimentConfig& config, const SpinCenter& spin,
                           const FieldMap* map = nullptr);

/// N copies of `spin` with identical coupling, placed at the same distance
/// from the wire axis at different angles and positions along the wire.
std::vector<SpinCenter> replicate_emitter(const SpinCenter& spin, std::size_t n);

struct SpectrumPoint {
  double b0 = 0.0;
  double theta = 0.0;
  Estimate c_mean;
  Estimate c_tilde;
};

struct SpectrumResult {
  PowerMode power = PowerMode::kHigh;
  std::vector<SpectrumPoint> points;
  std::size_t spin_count = 0;
  std::size_t driven_spins = 0;  // on-resonance radiative rate above threshold
  double center_estimate = 0.0;  // omega0 over the mean effective gamma
  std::optional<FitResult> lorentzian;  // high power, on <C>
  std::vector<Peak> peaks;              // low power, on <C~>
  std::vector<std::string> warnings;
};

SpectrumResult run_spectroscopy(const ExperimentConfig& config, const std::vector<SpinCenter>& spins,
                                const RunOptions& options);

struct SweepPoint {
  double x = 0.0;
  double amplitude = 1.0;
  Estimate c_tilde;
  Estimate c_mean;
  double excitation = 0.0;  // closed-form p_e for the target spin
};

struct SweepResult {
  std::string kind;
  std::uint32_t spin_id = 0;
  std::vector<SweepPoint> points;
  std::vector<FitResult> fits;
  // Named derived quantities: t2, t2_star, rabi_slope, ...
  std::vector<std::pair<std::string, double>> derived;
  std::vector<std::string> warnings;

  double value(const std::string& name) const;
};

SweepResult run_rabi(const ExperimentConfig& config, std::uint32_t spin_id, const RunOptions& options);
SweepResult run_ramsey(const ExperimentConfig& config, std::uint32_t spin_id, const RunOptions& options);
SweepResult run_hahn(const ExperimentConfig& config, std::uint32_t spin_id, const RunOptions& options);
SweepResult run_pdd(const ExperimentConfig& config, std::uint32_t spin_id, const RunOptions& options);

struct T1Point {
  double detuning = 0.0;
  double repetition = 0.0;
  double expected_t1 = 0.0;
  double t1 = 0.0;
  double t1_error = 0.0;
  FitResult fit;
  FluorescenceTrace trace;
};

struct T1Result {
  std::uint32_t spin_id = 0;
  std::vector<T1Point> points;
  std::optional<FitResult> purcell;
  std::vector<std::string> warnings;
};

T1Result run_t1(const ExperimentConfig& config, std::uint32_t spin_id, const RunOptions& options);

struct G2Run {
  G2Result result;
  std::size_t emitters = 1;
  ClickStream signal;   // pi-pulse series
  ClickStream no_pulse;
  std::vector<std::string> warnings;
};

G2Run run_g2(const ExperimentConfig& config, std::uint32_t spin_id, const RunOptions& options);

struct SnrRow {
  double t_m = 0.0;
  std::size_t blocks = 0;
  SignalComparison measured;
  double analytic = 0.0;
};

struct SnrResult {
  std::uint32_t spin_id = 0;
  SnrInputs inputs;
  std::vector<SnrRow> rows;
  LinearFit sqrt_fit;
  CountHistogram no_pulse;  // at the configured t_m
  CountHistogram pi;
  std::vector<std::string> warnings;
};

SnrResult run_snr(const ExperimentConfig& config, std::uint32_t spin_id, const RunOptions& options);

/// Optimizer inputs come from the target spin tuned to resonance.
struct OptimizeRun {
  SnrInputs inputs;
  OptimizeResult result;
};

OptimizeRun run_optimize(const ExperimentConfig& config, std::uint32_t spin_id,
                         const RunOptions& options);

VolumeResult run_volume(const ExperimentConfig& config, const RunOptions& options);

/// g0 / 2 pi (Hz) on the configured grid.
FieldMap run_gmap(const ExperimentConfig& config, const RunOptions& options);

}  // namespace spincount
