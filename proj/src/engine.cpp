#include "spincount/engine.hpp"

#include <algorithm>
#include <cmath>

#include "spincount/config.hpp"
#include "spincount/parallel.hpp"
#include "spincount/rng.hpp"

namespace spincount {

namespace {

struct Photon {
  std::uint32_t sequence;
  double time;
  double u;  // decides detection once the per-second efficiency is known
};

struct Event {
  double time;
  bool photon;
};

constexpr std::size_t kChunk = 4096;
constexpr std::size_t kMaxBurnIn = 20000;

std::size_t auto_burn_in(double p, double gamma_total, double record) {
  if (p <= 0.0) return 0;
  const double factor = std::abs(1.0 - 2.0 * p) * std::exp(-gamma_total * record);
  if (factor <= 0.0) return 1;
  if (factor >= 1.0) return kMaxBurnIn;
  const double n = std::ceil(std::log(1e-6) / std::log(factor));
  return static_cast<std::size_t>(std::min<double>(n, kMaxBurnIn));
}

}  // namespace

Hardware Hardware::from_config(const ExperimentConfig& config, const FieldMap* map) {
  return {config.resonator, config.detector, config.field, config.heating, map};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SimulationResult simulate(const Hardware& hw, const std::vector<SpinCenter>& spins,
                          const PulseSequence& seq, std::size_t sequences, std::uint64_t seed,
                          const SimulationOptions& options) {
  hw.resonator.validate();
  hw.detector.validate();
  hw.field.validate();
  hw.heating.validate();
  seq.validate();
  if (sequences > 0xFFFFFFF0u) throw std::invalid_argument("too many sequences for 32-bit indices");

  const double record = seq.record_length();
  const std::uint32_t offset = options.stream_offset;
  SimulationResult result;
  result.spins.resize(spins.size());
  std::vector<std::vector<Photon>> photons(spins.size());

  // Phase A: spin trajectories, one spin at a time.
  parallel_for(spins.size(), options.workers, [&](std::size_t k) {
    const SpinCenter& spin = spins[k];
    SpinTally& tally = result.spins[k];
    tally.id = spin.id;
    tally.rates = spin_rates(spin, hw.resonator, hw.field, hw.detector, hw.field_map);
    const SpinRates& r = tally.rates;
    const double on_resonance = purcell_rate(r.g0, 0.0, hw.resonator.kappa());
    const bool driven = on_resonance >= options.min_coupling_rate;
    const double delta = options.drive_frequency ? r.omega_s - *options.drive_frequency : 0.0;
    const double p = driven ? sequence_excitation(seq, spin, delta) : 0.0;
    tally.excitation = p;
    tally.burn_in = options.burn_in ? *options.burn_in : auto_burn_in(p, r.gamma_total, record);

    bool excited = false;
    const auto step = [&](CounterRng& rng, bool recording, std::uint32_t index) {
      if (recording && excited) ++tally.excited_before_pulse;
      if (p > 0.0 && rng.uniform() < p) excited = !excited;
      if (!excited || r.gamma_total <= 0.0) return;
      const double t = rng.exponential(r.gamma_total);
      if (t >= record) return;
      excited = false;
      if (!recording || rng.uniform() >= r.branching) return;
      ++tally.emitted;
      if (rng.uniform() >= r.detection) return;
      ++tally.arrived;
      photons[k].push_back({index, t, rng.uniform()});
    };
    for (std::size_t b = 0; b < tally.burn_in; ++b) {
      CounterRng rng(seed, static_cast<std::uint32_t>(b), spin.id, StreamId::kBurnIn);
      step(rng, false, 0);
    }
    for (std::size_t s = 0; s < sequences; ++s) {
      const auto index = static_cast<std::uint32_t>(s);
      CounterRng rng(seed, index + offset, spin.id, StreamId::kSpinDynamics);
      step(rng, true, index);
    }
  });

  // Group arrivals by sequence in (sequence, spin) order.
  std::vector<std::size_t> start(sequences + 1, 0);
  for (const auto& list : photons) {
    for (const Photon& ph : list) ++start[ph.sequence + 1];
  }
  for (std::size_t s = 0; s < sequences; ++s) start[s + 1] += start[s];
  std::vector<Photon> by_sequence(start.back());
  {
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (auto& list : photons) {
      for (const Photon& ph : list) by_sequence[fill[ph.sequence]++] = ph;
      list.clear();
      list.shrink_to_fit();
    }
  }

  // Detector efficiency per one-second block, reduced by the input flux.
  const double t_r = seq.repetition;
  const auto block_of = [&](std::size_t s) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(s) * t_r));
  };
  const std::size_t n_blocks = sequences == 0 ? 0 : block_of(sequences - 1) + 1;
  std::vector<double> block_arrivals(n_blocks, 0.0);
  std::vector<double> block_time(n_blocks, 0.0);
  for (std::size_t s = 0; s < sequences; ++s) {
    const std::size_t b = block_of(s);
    block_arrivals[b] += static_cast<double>(start[s + 1] - start[s]);
    block_time[b] += t_r;
  }
  std::vector<double> eta(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const double flux = block_arrivals[b] / block_time[b];
    eta[b] = hw.detector.eta_smpd / (1.0 + flux / hw.detector.saturation_flux);
  }

  const HeatingModel& heat = hw.heating;
  double heating_mean = 0.0;
  double heating_norm = 0.0;
  if (heat.enabled() && seq.pulse_count() > 0) {
    const double offset_mean =
        heat.offset_counts * (1.0 - std::exp(-seq.drive_area() / heat.buildup_time));
    heating_norm = 1.0 - std::exp(-record / heat.decay_time);
    heating_mean = (heat.amplitude * seq.pulse_energy() * heat.decay_time + offset_mean) * heating_norm;
  }

  // Phase B: detector cycles, one chunk of sequences at a time.
  const DetectorModel& det = hw.detector;
  const std::size_t n_chunks = (sequences + kChunk - 1) / kChunk;
  struct ChunkOut {
    std::vector<Click> clicks;
    std::vector<std::uint32_t> counts;
    std::uint64_t dark = 0;
    std::uint64_t heating = 0;
    std::uint64_t photon_clicks = 0;
  };
  std::vector<ChunkOut> chunks(n_chunks);
  parallel_for(n_chunks, options.workers, [&](std::size_t c) {
    ChunkOut& out = chunks[c];
    std::vector<Event> events;
    const std::size_t s_end = std::min(sequences, (c + 1) * kChunk);
    for (std::size_t s = c * kChunk; s < s_end; ++s) {
      events.clear();
      const auto index = static_cast<std::uint32_t>(s) + offset;
      if (det.dark_rate > 0.0) {
        CounterRng rng(seed, index, 0, StreamId::kDarkCounts);
        for (double t = rng.exponential(det.dark_rate); t < record; t += rng.exponential(det.dark_rate)) {
          events.push_back({t, false});
          ++out.dark;
        }
      }
      if (heating_mean > 0.0) {
        CounterRng rng(seed, index, 0, StreamId::kHeating);
        const std::uint64_t n = rng.poisson(heating_mean);
        for (std::uint64_t i = 0; i < n; ++i) {
          events.push_back({-heat.decay_time * std::log1p(-rng.uniform() * heating_norm), false});
        }
        out.heating += n;
      }
      const double e = eta[block_of(s)];
      for (std::size_t i = start[s]; i < start[s + 1]; ++i) {
        const Photon& ph = by_sequence[i];
        if (ph.u >= e) continue;
        if (det.explicit_dead_time &&
            std::fmod(ph.time, det.cycle_duration) >= det.detection_window) {
          continue;
        }
        events.push_back({ph.time, true});
      }
      std::sort(events.begin(), events.end(),
                [](const Event& a, const Event& b) { return a.time < b.time; });
      std::uint32_t count = 0;
      std::int64_t last_cycle = -1;
      for (const Event& ev : events) {
        const auto cycle = static_cast<std::int64_t>(std::floor(ev.time / det.cycle_duration));
        if (cycle == last_cycle) continue;
        last_cycle = cycle;
        out.clicks.push_back({static_cast<std::uint32_t>(cycle), ev.time});
        out.photon_clicks += ev.photon ? 1 : 0;
        ++count;
      }
      out.counts.push_back(count);
    }
  });

  result.clicks = ClickStream(record, det.cycle_duration);
  for (const ChunkOut& out : chunks) {
    std::size_t pos = 0;
    for (std::uint32_t n : out.counts) {
      result.clicks.append_sequence(std::span<const Click>(out.clicks.data() + pos, n));
      pos += n;
    }
    result.dark_events += out.dark;
    result.heating_events += out.heating;
    result.photon_clicks += out.photon_clicks;
  }
  return result;
}

}  // namespace spincount
