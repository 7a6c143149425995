#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spincount/clicks.hpp"
#include "spincount/model.hpp"
#include "spincount/physics.hpp"
#include "spincount/pulse.hpp"

namespace spincount {

struct ExperimentConfig;
class FieldMap;

/// Static hardware description shared by all spins of a run.
struct Hardware {
  ResonatorModel resonator;
  DetectorModel detector;
  FieldSetting field;
  HeatingModel heating;
  const FieldMap* field_map = nullptr;

  static Hardware from_config(const ExperimentConfig& config, const FieldMap* map = nullptr);
};

struct SimulationOptions {
  // Drive carrier (rad/s). Unset: every spin is driven on its own resonance.
  std::optional<double> drive_frequency;
  // Spins whose on-resonance radiative rate is below this are not driven.
  double min_coupling_rate = 0.0;
  // Sequences run before recording starts. Unset: chosen per spin from its
  // mixing rate.
  std::optional<std::size_t> burn_in;
  std::size_t workers = 0;
  // Shifts every sequence counter so that several series drawn with one seed
  // stay independent.
  std::uint32_t stream_offset = 0;
};

struct SpinTally {
  std::uint32_t id = 0;
  SpinRates rates;
  double excitation = 0.0;  // p_e per sequence
  std::size_t burn_in = 0;
  std::uint64_t excited_before_pulse = 0;
  std::uint64_t emitted = 0;  // radiative decays inside the record
  std::uint64_t arrived = 0;  // photons reaching the detector input
};

struct SimulationResult {
  ClickStream clicks;
  std::vector<SpinTally> spins;
  std::uint64_t dark_events = 0;
  std::uint64_t heating_events = 0;
  std::uint64_t photon_clicks = 0;
};

/// Generates `sequences` repetitions of `seq`. Each spin carries its excited
/// or ground state from one repetition to the next. The output depends only on
/// the inputs and `seed`, never on the worker count.
SimulationResult simulate(const Hardware& hardware, const std::vector<SpinCenter>& spins,
                          const PulseSequence& seq, std::size_t sequences, std::uint64_t seed,
                          const SimulationOptions& options = {});

/// Independent child seed for a named sub-run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

}  // namespace spincount
