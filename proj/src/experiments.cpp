#include "spincount/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

#include "spincount/ensemble.hpp"
#include "spincount/field_map.hpp"
#include "spincount/parallel.hpp"
#include "spincount/physics.hpp"

namespace spincount {

namespace {

using constants::kPi;
using constants::kTwoPi;

// Seed tags keep the sub-runs of one command independent of each other.
enum : std::uint64_t {
  kTagEnsemble = 1,
  kTagSpectrum = 2,
  kTagSweep = 3,
  kTagT1 = 4,
  kTagG2Signal = 5,
  kTagG2Dark = 6,
  kTagG2Bootstrap = 7,
  kTagSnrPi = 8,
  kTagSnrDark = 9,
};

std::uint64_t point_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return derive_seed(derive_seed(seed, tag), index);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n, a);
  for (std::size_t i = 1; i < n; ++i) {
    v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

Hardware tuned_hardware(const ExperimentConfig& config, const RunOptions& options,
                        const FieldSetting& field) {
  Hardware hw = Hardware::from_config(config, options.field_map);
  hw.field = field;
  return hw;
}

std::vector<double> usable_sigma(const std::vector<double>& sem) {
  for (double s : sem) {
    if (!(s > 0.0)) return {};
  }
  return sem;
}

// pi pulse of the single-pulse experiments (T1, g2, SNR): twice the Ramsey pi/2.
PulseSequence pi_sequence(const ExperimentConfig& config, double repetition, double window) {
  return PulseSequence::single(kPi, 2.0 * config.ramsey.pulse_duration, repetition, window);
}

void note_fit(const FitResult& fit, const std::string& what, std::vector<std::string>& warnings) {
  if (!fit.converged) warnings.push_back(fmt::format("{} fit did not converge", what));
  if (fit.model_mismatch) {
    warnings.push_back(fmt::format("{} fit: reduced chi2 {:.3g} suggests model mismatch", what,
                                   fit.reduced_chi2));
  }
}

using Builder = PulseSequence (*)(double, double, double, double, double);

SweepResult run_coherence(const ExperimentConfig& config, std::uint32_t spin_id,
                          const RunOptions& options, const CoherenceSettings& s,
                          const std::string& kind, Builder build, DecayModel model,
                          const std::string& derived_name, double envelope_scale) {
  const SpinCenter& spin = config.spin(spin_id);
  const Hardware hw = tuned_hardware(config, options, tuned_field(config, spin));
  SweepResult out;
  out.kind = kind;
  out.spin_id = spin_id;
  const auto taus = linspace(s.tau_start, s.tau_stop, s.points);
  out.points.resize(taus.size());
  SimulationOptions so;
  so.workers = 1;
  parallel_for(taus.size(), options.workers, [&](std::size_t i) {
    PulseSequence seq = build(taus[i], s.pulse_duration, s.phase_ramp, s.repetition, s.window);
    seq.detuning_sign = s.detuning_sign;
    const auto r = simulate(hw, {spin}, seq, s.sequences, point_seed(options.seed, kTagSweep, i), so);
    const auto sum = summarize_counts(r.clicks, s.window);
    out.points[i] = {taus[i], 1.0, sum.c_tilde, sum.c_mean, r.spins.front().excitation};
  });
  if (out.points.size() >= 8) {
    std::vector<double> x, y, e;
    for (const auto& p : out.points) {
      x.push_back(p.x);
      y.push_back(p.c_tilde.mean);
      e.push_back(p.c_tilde.sem);
    }
    FitResult fit = fit_decay(x, y, model, usable_sigma(e));
    note_fit(fit, kind, out.warnings);
    out.derived.emplace_back(derived_name, envelope_scale * fit.param("t2"));
    out.derived.emplace_back(derived_name + "_error", envelope_scale * fit.error("t2"));
    out.derived.emplace_back("frequency", fit.param("frequency"));
    out.fits.push_back(std::move(fit));
  } else {
    out.warnings.push_back("fewer than 8 points: no fit");
  }
  return out;
}

}  // namespace

double SweepResult::value(const std::string& name) const {
  for (const auto& [k, v] : derived) {
    if (k == name) return v;
  }
  throw std::out_of_range(fmt::format("no derived value '{}'", name));
}

std::vector<SpinCenter> experiment_spins(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.spectroscopy.use_config_spins) return config.spins;
  return sample_spin_ensemble(config.crystal, config.ensemble, config.resonator, config.field,
                              config.nonradiative, derive_seed(seed, kTagEnsemble));
}

FieldSetting tuned_field(const ExperimentConfig& config, const SpinCenter& spin, double delta) {
  FieldSetting f = config.field;
  const double g = effective_gamma(spin.tensor, f.theta, f.beta);
  if (!(g > 0.0)) throw std::invalid_argument("spin has no response along the field direction");
  f.b0 = (config.resonator.omega0 + delta) / g;
  return f;
}

SpinSummary summarize_spin(const ExperimentConfig& config, const SpinCenter& spin,
                           const FieldMap* map) {
  SpinSummary s;
  s.field = tuned_field(config, spin);
  s.rates = spin_rates(spin, config.resonator, s.field, config.detector, map);
  s.efficiency = efficiency_chain(s.rates.gamma_r, s.rates.gamma_nr, config.resonator, config.detector);
  return s;
}

std::vector<SpinCenter> replicate_emitter(const SpinCenter& spin, std::size_t n) {
  std::vector<SpinCenter> out;
  if (n == 0) return out;
  out.push_back(spin);
  const double r = std::hypot(spin.position.x, spin.position.y);
  for (std::size_t k = 1; k < n; ++k) {
    SpinCenter s = spin;
    s.id = spin.id + static_cast<std::uint32_t>(k) * 0x10000u;
    const double phi = kPi * static_cast<double>(k) / static_cast<double>(n + 1);
    s.position = {r * std::cos(phi), r * std::sin(phi), spin.position.z + 1e-6 * static_cast<double>(k)};
    out.push_back(s);
  }
  return out;
}

SpectrumResult run_spectroscopy(const ExperimentConfig& config, const std::vector<SpinCenter>& spins,
                                const RunOptions& options) {
  const auto& s = config.spectroscopy;
  SpectrumResult out;
  out.power = s.power;
  out.spin_count = spins.size();

  std::vector<std::pair<double, double>> grid;  // (b0, theta)
  const auto b0s = linspace(s.b0_start, s.b0_stop, s.points);
  if (s.theta_linked) {
    const auto th = linspace(s.theta_start, s.theta_stop, s.points);
    for (std::size_t i = 0; i < b0s.size(); ++i) grid.emplace_back(b0s[i], th[i]);
  } else {
    for (double t : linspace(s.theta_start, s.theta_stop, s.theta_points)) {
      for (double b : b0s) grid.emplace_back(b, t);
    }
  }

  const bool high = s.power == PowerMode::kHigh;
  const double rotation = high ? 0.5 * kPi : kPi;
  const PulseSequence seq = PulseSequence::single(rotation, s.pulse_duration, s.repetition, s.window);
  SimulationOptions so;
  so.workers = 1;
  if (!high) {
    so.min_coupling_rate = s.low_power_threshold;
    so.drive_frequency = config.resonator.omega0;
  }
  const double kappa = config.resonator.kappa();
  for (const auto& sp : spins) {
    const double g0 = coupling_strength(sp, config.resonator, options.field_map);
    if (purcell_rate(g0, 0.0, kappa) >= s.low_power_threshold) ++out.driven_spins;
  }

  Hardware base = Hardware::from_config(config, options.field_map);
  out.points.resize(grid.size());
  parallel_for(grid.size(), options.workers, [&](std::size_t i) {
    Hardware hw = base;
    hw.field.b0 = grid[i].first;
    hw.field.theta = grid[i].second;
    const auto r = simulate(hw, spins, seq, s.sequences, point_seed(options.seed, kTagSpectrum, i), so);
    const auto sum = summarize_counts(r.clicks, s.window);
    out.points[i] = {grid[i].first, grid[i].second, sum.c_mean, sum.c_tilde};
  });

  double gsum = 0.0;
  for (const auto& sp : spins) gsum += effective_gamma(sp.tensor, s.theta_start, config.field.beta);
  const double gmean = spins.empty() ? effective_gamma(GyromagneticTensor{}, s.theta_start, config.field.beta)
                                     : gsum / static_cast<double>(spins.size());
  out.center_estimate = config.resonator.omega0 / gmean;

  const bool one_dim = s.theta_linked || s.theta_points == 1;
  if (!one_dim) return out;
  std::vector<double> x, y, e;
  for (const auto& p : out.points) {
    x.push_back(p.b0);
    if (high) {
      y.push_back(p.c_mean.mean);
      e.push_back(p.c_mean.sem);
    } else {
      y.push_back(p.c_tilde.mean);
      e.push_back(p.c_tilde.sem);
    }
  }
  if (high) {
    if (x.size() >= 5) {
      out.lorentzian = fit_lorentzian_peak(x, y, usable_sigma(e));
      note_fit(*out.lorentzian, "lorentzian", out.warnings);
    }
  } else {
    // Peaks closer than half the pulse bandwidth (in field units) merge.
    const double sep = 0.5 * kTwoPi / s.pulse_duration / gmean;
    out.peaks = find_peaks(x, y, e, 5.0, sep);
  }
  return out;
}

SweepResult run_rabi(const ExperimentConfig& config, std::uint32_t spin_id, const RunOptions& options) {
  const auto& s = config.rabi;
  const SpinCenter& spin = config.spin(spin_id);
  const Hardware hw = tuned_hardware(config, options, tuned_field(config, spin));
  SweepResult out;
  out.kind = "rabi";
  out.spin_id = spin_id;
  const auto durations = linspace(s.duration_start, s.duration_stop, s.points);
  const std::size_t n = durations.size();
  out.points.resize(n * s.amplitudes.size());
  SimulationOptions so;
  so.workers = 1;
  parallel_for(out.points.size(), options.workers, [&](std::size_t i) {
    const double t = durations[i % n];
    const double a = s.amplitudes[i / n];
    const auto seq = PulseSequence::rabi(t, a, s.rabi_coeff, s.repetition, s.window);
    const auto r = simulate(hw, {spin}, seq, s.sequences, point_seed(options.seed, kTagSweep, i), so);
    const auto sum = summarize_counts(r.clicks, s.window);
    out.points[i] = {t, a, sum.c_tilde, sum.c_mean, r.spins.front().excitation};
  });

  double saf = 0.0, saa = 0.0;
  for (std::size_t k = 0; k < s.amplitudes.size(); ++k) {
    const double a = s.amplitudes[k];
    if (a == 0.0) {
      out.warnings.push_back("zero amplitude: no oscillation to fit");
      continue;
    }
    if (n < 8) {
      out.warnings.push_back("fewer than 8 points: no fit");
      continue;
    }
    std::vector<double> x, y, e;
    for (std::size_t j = 0; j < n; ++j) {
      const auto& p = out.points[k * n + j];
      x.push_back(p.x);
      y.push_back(p.c_tilde.mean);
      e.push_back(p.c_tilde.sem);
    }
    FitResult fit = fit_decay(x, y, DecayModel::kSinePlusLinear, usable_sigma(e));
    note_fit(fit, fmt::format("rabi A={:g}", a), out.warnings);
    const double f = std::abs(fit.param("frequency"));
    out.derived.emplace_back(fmt::format("rabi_frequency_{:g}", a), f);
    saf += a * f;
    saa += a * a;
    out.fits.push_back(std::move(fit));
  }
  // Rabi frequency per unit amplitude, through the origin.
  if (saa > 0.0) out.derived.emplace_back("rabi_slope", saf / saa);
  return out;
}

SweepResult run_ramsey(const ExperimentConfig& config, std::uint32_t spin_id, const RunOptions& options) {
  return run_coherence(config, spin_id, options, config.ramsey, "ramsey", &PulseSequence::ramsey,
                       DecayModel::kGaussianDampedSine, "t2_star", 1.0);
}

SweepResult run_hahn(const ExperimentConfig& config, std::uint32_t spin_id, const RunOptions& options) {
  // Envelope exp(-2 tau / T2) in the gap tau.
  return run_coherence(config, spin_id, options, config.hahn, "hahn", &PulseSequence::hahn,
                       DecayModel::kExpDampedSine, "t2", 2.0);
}

SweepResult run_pdd(const ExperimentConfig& config, std::uint32_t spin_id, const RunOptions& options) {
  return run_coherence(config, spin_id, options, config.pdd, "pdd", &PulseSequence::pdd,
                       DecayModel::kExpDampedSine, "t2_pdd", 4.0);
}

T1Result run_t1(const ExperimentConfig& config, std::uint32_t spin_id, const RunOptions& options) {
  const auto& s = config.t1;
  const SpinCenter& spin = config.spin(spin_id);
  T1Result out;
  out.spin_id = spin_id;
  out.points.resize(s.detunings.size());
  SimulationOptions so;
  so.workers = 1;
  parallel_for(s.detunings.size(), options.workers, [&](std::size_t i) {
    const double delta = s.detunings[i];
    const FieldSetting field = tuned_field(config, spin, delta);
    const Hardware hw = tuned_hardware(config, options, field);
    const auto rates = spin_rates(spin, config.resonator, field, config.detector, options.field_map);
    T1Point& p = out.points[i];
    p.detuning = delta;
    p.expected_t1 = 1.0 / rates.gamma_total;
    // Long enough for the decay to finish before the next pulse.
    p.repetition = std::max(s.repetition, 6.0 * p.expected_t1);
    const auto seq = pi_sequence(config, p.repetition, p.repetition - 2.0 * config.ramsey.pulse_duration);
    const auto r = simulate(hw, {spin}, seq, s.sequences, point_seed(options.seed, kTagT1, i), so);
    p.trace = fluorescence_trace(r.clicks, s.bin_width);
    std::vector<double> x, y, e;
    for (std::size_t b = 0; b < p.trace.time.size(); ++b) {
      if (p.trace.time[b] - 0.5 * s.bin_width < s.exclusion) continue;
      x.push_back(p.trace.time[b]);
      y.push_back(p.trace.rate[b]);
      e.push_back(p.trace.error[b]);
    }
    p.fit = fit_decay(x, y, DecayModel::kExponential, e);
    p.t1 = p.fit.param("tau");
    p.t1_error = p.fit.error("tau");
  });
  for (const auto& p : out.points) note_fit(p.fit, fmt::format("T1 at delta={:g}", p.detuning), out.warnings);

  bool below = false, above = false;
  for (double d : s.detunings) {
    below |= d < 0.0;
    above |= d > 0.0;
  }
  if (below && above) {
    std::vector<double> d, t, e;
    for (const auto& p : out.points) {
      d.push_back(p.detuning);
      t.push_back(p.t1);
      e.push_back(p.t1_error);
    }
    out.purcell = fit_purcell_detuning(d, t, usable_sigma(e), s.fit_kappa ? 0.0 : config.resonator.kappa());
    note_fit(*out.purcell, "Purcell", out.warnings);
  }
  return out;
}

G2Run run_g2(const ExperimentConfig& config, std::uint32_t spin_id, const RunOptions& options) {
  const auto& s = config.g2;
  const SpinCenter& spin = config.spin(spin_id);
  const Hardware hw = tuned_hardware(config, options, tuned_field(config, spin));
  G2Run out;
  out.emitters = s.emitters;
  if (s.sequences < 10000) {
    out.warnings.push_back(fmt::format("{} sequences is below the 1e4 needed for stable g2", s.sequences));
  }
  const auto emitters = replicate_emitter(spin, s.emitters);
  const double record = s.repetition - 2.0 * config.ramsey.pulse_duration;
  SimulationOptions so;
  so.workers = options.workers;
  auto sig = simulate(hw, emitters, pi_sequence(config, s.repetition, record), s.sequences,
                            derive_seed(options.seed, kTagG2Signal), so);
  auto dark = simulate(hw, emitters, PulseSequence::empty(s.repetition, s.repetition), s.sequences,
                             derive_seed(options.seed, kTagG2Dark), so);
  G2Options go;
  go.binning = {s.exclusion, s.bin_width, s.bins};
  go.max_lag = s.max_lag;
  go.bootstrap = s.bootstrap;
  go.seed = derive_seed(options.seed, kTagG2Bootstrap);
  go.workers = options.workers;
  out.result = analyze_g2(sig.clicks, &dark.clicks, go);
  out.signal = std::move(sig.clicks);
  out.no_pulse = std::move(dark.clicks);
  if (!out.result.correction_defined) out.warnings.push_back("no spin signal: background correction undefined");
  return out;
}

SnrResult run_snr(const ExperimentConfig& config, std::uint32_t spin_id, const RunOptions& options) {
  const auto& s = config.snr;
  const auto& proto = config.protocol;
  const SpinCenter& spin = config.spin(spin_id);
  const SpinSummary sum = summarize_spin(config, spin, options.field_map);
  const Hardware hw = tuned_hardware(config, options, sum.field);
  SnrResult out;
  out.spin_id = spin_id;
  out.inputs = {sum.rates.gamma_total, config.detector.dark_rate, sum.efficiency.eta_total, proto};

  const auto n = static_cast<std::size_t>(std::llround(s.total_time / proto.t_r));
  SimulationOptions so;
  so.workers = options.workers;
  const auto pi = simulate(hw, {spin}, pi_sequence(config, proto.t_r, proto.t_d), n,
                           derive_seed(options.seed, kTagSnrPi), so);
  const auto dark = simulate(hw, {spin}, PulseSequence::empty(proto.t_r, proto.t_d), n,
                             derive_seed(options.seed, kTagSnrDark), so);
  out.no_pulse = count_histogram(dark.clicks, proto);
  out.pi = count_histogram(pi.clicks, proto);

  std::vector<double> tm, measured;
  for (double t_m : s.measurement_times) {
    ProtocolParams p = proto;
    p.t_m = t_m;
    SnrRow row;
    row.t_m = t_m;
    const auto h0 = count_histogram(dark.clicks, p);
    const auto h1 = count_histogram(pi.clicks, p);
    row.blocks = h0.block_counts.size();
    row.measured = compare_histograms(h0, h1);
    SnrInputs in = out.inputs;
    in.params = p;
    row.analytic = snr(in);
    if (row.measured.insufficient) {
      out.warnings.push_back(fmt::format("t_m = {:g} s: only {} blocks", t_m, row.blocks));
    }
    tm.push_back(t_m);
    measured.push_back(row.measured.snr);
    out.rows.push_back(row);
  }
  if (tm.size() >= 2) out.sqrt_fit = fit_sqrt_law(tm, measured);
  return out;
}

OptimizeRun run_optimize(const ExperimentConfig& config, std::uint32_t spin_id,
                         const RunOptions& options) {
  const SpinSummary sum = summarize_spin(config, config.spin(spin_id), options.field_map);
  OptimizeRun out;
  out.inputs = {sum.rates.gamma_total, config.detector.dark_rate, sum.efficiency.eta_total, config.protocol};
  const auto& o = config.optimize;
  out.result = optimize_protocol(out.inputs.gamma_r, out.inputs.alpha, out.inputs.eta, config.protocol.t_m,
                                 OptimizeBounds{o.t_min, o.t_max, o.grid, o.tolerance});
  return out;
}

VolumeResult run_volume(const ExperimentConfig& config, const RunOptions& options) {
  return detection_volume(config.resonator, config.volume.threshold, config.volume.base_grid,
                          constants::kGammaPerp, options.field_map);
}

FieldMap run_gmap(const ExperimentConfig& config, const RunOptions& options) {
  const auto& g = config.gmap;
  if (g.nx < 2 || g.ny < 2) throw std::invalid_argument("gmap needs at least 2 x 2 nodes");
  const double dx = (g.x_max - g.x_min) / static_cast<double>(g.nx - 1);
  const double dy = (g.y_max - g.y_min) / static_cast<double>(g.ny - 1);
  FieldMap map(g.nx, g.ny, g.x_min, g.y_min, dx, dy);
  SpinCenter probe;
  parallel_for(g.ny, options.workers, [&](std::size_t j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      SpinCenter sp = probe;
      sp.position = {map.x(i), map.y(j), 0.0};
      // The wire axis itself sits inside the field cutoff.
      if (sp.position.x == 0.0 && sp.position.y == 0.0) sp.position.x = 1e-30;
      map.at(i, j) = coupling_strength(sp, config.resonator, options.field_map) / kTwoPi;
    }
  });
  return map;
}

}  // namespace spincount
