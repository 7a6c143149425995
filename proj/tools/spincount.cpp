// spincount: config -> simulate -> analyze -> report, one subcommand per experiment.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "spincount/config.hpp"
#include "spincount/ensemble.hpp"
#include "spincount/experiments.hpp"
#include "spincount/field_map.hpp"
#include "spincount/manifest.hpp"
#include "spincount/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spincount;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kNonConvergence = 3, kStatistics = 4 };

const std::vector<std::string> kCommands{"spectroscopy", "rabi", "ramsey", "hahn", "pdd", "t1",
                                         "g2", "snr", "optimize", "volume", "gmap"};

struct Invocation {
  std::string command;
  ExperimentConfig config;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::string format = "text";
  bool strict = false;
  std::optional<std::uint32_t> spin;
  fs::path out = "out";
};

struct Outcome {
  std::vector<std::string> warnings;
  bool nonconverged = false;
};

// Records every file written so the manifest can hash them.
class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name, bool binary = false) {
    std::ofstream f(dir_ / name, binary ? std::ios::binary : std::ios::out);
    if (!f) throw std::runtime_error(fmt::format("cannot write {}", (dir_ / name).string()));
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
    return f;
  }
  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

json fit_json(const FitResult& f) {
  json j;
  j["model"] = f.model;
  for (std::size_t i = 0; i < f.names.size(); ++i) {
    j["params"][f.names[i]] = {{"value", f.params[i]}, {"error", f.errors[i]}};
  }
  j["chi2"] = f.chi2;
  j["dof"] = f.dof;
  j["reduced_chi2"] = f.reduced_chi2;
  j["converged"] = f.converged;
  j["model_mismatch"] = f.model_mismatch;
  return j;
}


void check_fit(const FitResult& f, Outcome& o) {
  if (!f.converged) o.nonconverged = true;
}

std::uint32_t target_spin(const Invocation& inv) {
  if (inv.spin) {
    inv.config.spin(*inv.spin);  // throws for an unknown id
    return *inv.spin;
  }
  if (inv.config.spins.empty()) throw ConfigError(fmt::format("'{}' needs a spin in the config", inv.command));
  return inv.config.spins.front().id;
}

json provenance(const Invocation& inv, const std::string& map_hash) {
  json p;
  p["tool"] = "spincount";
  p["version"] = tool_version();
  p["command"] = inv.command;
  p["config_hash"] = config_hash(inv.config);
  p["seed"] = std::to_string(inv.seed);
  if (!map_hash.empty()) p["field_map_hash"] = map_hash;
  if (inv.spin) p["spin"] = *inv.spin;
  return p;
}

void write_stream(OutputDir& out, const std::string& stem, const ClickStream& s, const std::string& format) {
  if (format == "binary") {
    auto f = out.open(stem + ".bin", true);
    s.write_binary(f);
  } else {
    auto f = out.open(stem + ".txt");
    s.write_text(f);
  }
}

void write_histogram(OutputDir& out, const std::string& name, const CountHistogram& h) {
  auto f = out.open(name);
  fmt::print(f, "counts,blocks,probability,poisson\n");
  const auto p = normalized_histogram(h);
  const auto pois = poisson_pmf(h.mean, p.empty() ? 0 : p.size() - 1);
  for (std::size_t c = 0; c < p.size(); ++c) {
    fmt::print(f, "{},{},{:.10g},{:.10g}\n", c, h.frequency[c], p[c], pois[c]);
  }
}

json histogram_json(const CountHistogram& h) {
  return {{"blocks", h.block_counts.size()},    {"sequences_per_block", h.sequences_per_block},
          {"mean", h.mean},                     {"variance", h.variance},
          {"poisson_sigma", h.poisson_sigma},   {"insufficient", h.insufficient}};
}

Outcome run_command(const Invocation& inv, const FieldMap* map, OutputDir& out, json& summary) {
  Outcome o;
  const RunOptions opts{inv.seed, inv.workers, map};
  const auto& cfg = inv.config;
  const std::string& cmd = inv.command;

  if (cmd == "spectroscopy") {
    const auto spins = experiment_spins(cfg, inv.seed);
    {
      auto f = out.open("spins.csv");
      write_ensemble_csv(f, spins);
    }
    const auto r = run_spectroscopy(cfg, spins, opts);
    for (const auto& [name, pick] :
         {std::pair<std::string, bool>{"c_mean.csv", true}, {"c_tilde.csv", false}}) {
      auto f = out.open(name);
      fmt::print(f, "b0_T,theta_rad,value,sem\n");
      for (const auto& p : r.points) {
        const Estimate& e = pick ? p.c_mean : p.c_tilde;
        fmt::print(f, "{:.10g},{:.10g},{:.10g},{:.10g}\n", p.b0, p.theta, e.mean, e.sem);
      }
    }
    const auto& s = cfg.spectroscopy;
    if (!s.theta_linked && s.theta_points > 1) {
      auto f = out.open("c_tilde_2d.csv");
      fmt::print(f, "theta_rad\\b0_T");
      for (std::size_t i = 0; i < s.points; ++i) fmt::print(f, ",{:.10g}", r.points[i].b0);
      fmt::print(f, "\n");
      for (std::size_t t = 0; t < s.theta_points; ++t) {
        fmt::print(f, "{:.10g}", r.points[t * s.points].theta);
        for (std::size_t i = 0; i < s.points; ++i) fmt::print(f, ",{:.10g}", r.points[t * s.points + i].c_tilde.mean);
        fmt::print(f, "\n");
      }
    }
    summary["power"] = s.power == PowerMode::kHigh ? "high" : "low";
    summary["spins"] = r.spin_count;
    summary["driven_spins"] = r.driven_spins;
    summary["center_estimate_T"] = r.center_estimate;
    summary["windows"] = {{"repetition_s", s.repetition}, {"window_s", s.window}};
    if (r.lorentzian) {
      summary["lorentzian"] = fit_json(*r.lorentzian);
      check_fit(*r.lorentzian, o);
    }
    summary["peaks"] = json::array();
    for (const auto& p : r.peaks) {
      summary["peaks"].push_back({{"b0_T", p.position}, {"height", p.height}, {"significance", p.significance}});
    }
    o.warnings = r.warnings;
    if (r.spin_count == 0) o.warnings.push_back("no spins: flat background only");
  } else if (cmd == "rabi" || cmd == "ramsey" || cmd == "hahn" || cmd == "pdd") {
    const std::uint32_t id = target_spin(inv);
    SweepResult r;
    if (cmd == "rabi") r = run_rabi(cfg, id, opts);
    if (cmd == "ramsey") r = run_ramsey(cfg, id, opts);
    if (cmd == "hahn") r = run_hahn(cfg, id, opts);
    if (cmd == "pdd") r = run_pdd(cfg, id, opts);
    {
      auto f = out.open(cmd + ".csv");
      fmt::print(f, "{},amplitude,c_tilde,sem,excitation\n", cmd == "rabi" ? "duration_s" : "tau_s");
      for (const auto& p : r.points) {
        fmt::print(f, "{:.10g},{:.10g},{:.10g},{:.10g},{:.10g}\n", p.x, p.amplitude, p.c_tilde.mean,
                   p.c_tilde.sem, p.excitation);
      }
    }
    summary["spin"] = id;
    summary["fits"] = json::array();
    for (const auto& f : r.fits) {
      summary["fits"].push_back(fit_json(f));
      check_fit(f, o);
    }
    for (const auto& [k, v] : r.derived) summary["derived"][k] = v;
    o.warnings = r.warnings;
  } else if (cmd == "t1") {
    const std::uint32_t id = target_spin(inv);
    const auto r = run_t1(cfg, id, opts);
    {
      auto f = out.open("t1_vs_detuning.csv");
      fmt::print(f, "detuning_rad_s,t1_s,t1_error_s,expected_t1_s\n");
      for (const auto& p : r.points) {
        fmt::print(f, "{:.10g},{:.10g},{:.10g},{:.10g}\n", p.detuning, p.t1, p.t1_error, p.expected_t1);
      }
    }
    summary["points"] = json::array();
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      const auto& p = r.points[i];
      auto f = out.open(fmt::format("t1_trace_{}.csv", i));
      fmt::print(f, "time_s,rate_per_s,error_per_s\n");
      for (std::size_t b = 0; b < p.trace.time.size(); ++b) {
        fmt::print(f, "{:.10g},{:.10g},{:.10g}\n", p.trace.time[b], p.trace.rate[b], p.trace.error[b]);
      }
      summary["points"].push_back({{"detuning_rad_s", p.detuning}, {"repetition_s", p.repetition},
                                   {"fit", fit_json(p.fit)}});
      check_fit(p.fit, o);
    }
    if (r.purcell) {
      summary["purcell"] = fit_json(*r.purcell);
      check_fit(*r.purcell, o);
    }
    summary["spin"] = id;
    summary["windows"] = {{"bin_width_s", cfg.t1.bin_width}, {"exclusion_s", cfg.t1.exclusion}};
    o.warnings = r.warnings;
  } else if (cmd == "g2") {
    const std::uint32_t id = target_spin(inv);
    const auto r = run_g2(cfg, id, opts);
    const auto& g = r.result;
    {
      auto f = out.open("g2_intra.csv");
      fmt::print(f, "tau_s,g2,error,single_emitter_prediction\n");
      for (std::size_t i = 0; i < g.intra.size(); ++i) {
        fmt::print(f, "{:.10g},{:.10g},{:.10g},{:.10g}\n", g.intra_tau[i], g.intra[i], g.intra_error[i],
                   g.intra_prediction[i]);
      }
    }
    {
      auto f = out.open("g2_inter.csv");
      fmt::print(f, "k,g2,error,corrected,corrected_error\n");
      for (std::size_t i = 0; i < g.lags.size(); ++i) {
        fmt::print(f, "{},{:.10g},{:.10g},{:.10g},{:.10g}\n", g.lags[i], g.inter[i], g.inter_error[i],
                   g.corrected.empty() ? NAN : g.corrected[i], g.corrected_error.empty() ? NAN : g.corrected_error[i]);
      }
    }
    write_stream(out, "clicks_pi", r.signal, inv.format);
    write_stream(out, "clicks_no_pulse", r.no_pulse, inv.format);
    summary["spin"] = id;
    summary["emitters"] = r.emitters;
    summary["sequences"] = g.sequences;
    summary["a0"] = g.a0;
    summary["a1"] = g.a1;
    summary["dark_source"] = g.dark_source;
    summary["bootstrap_blocks"] = g.bootstrap_blocks;
    summary["correction_defined"] = g.correction_defined;
    summary["signal_means"] = g.signal_means;
    summary["dark_means"] = g.dark_means;
    const auto& b = cfg.g2;
    summary["windows"] = {{"exclusion_s", b.exclusion}, {"bin_width_s", b.bin_width}, {"bins", b.bins},
                          {"repetition_s", b.repetition}};
    o.warnings = r.warnings;
  } else if (cmd == "snr") {
    const std::uint32_t id = target_spin(inv);
    const auto r = run_snr(cfg, id, opts);
    {
      auto f = out.open("snr_vs_tm.csv");
      fmt::print(f, "t_m_s,blocks,c_spin,delta_c0,delta_cpi,snr_measured,snr_analytic\n");
      for (const auto& row : r.rows) {
        fmt::print(f, "{:.10g},{},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g}\n", row.t_m, row.blocks,
                   row.measured.c_spin, row.measured.delta_c0, row.measured.delta_cpi, row.measured.snr,
                   row.analytic);
      }
    }
    write_histogram(out, "histogram_no_pulse.csv", r.no_pulse);
    write_histogram(out, "histogram_pi.csv", r.pi);
    summary["spin"] = id;
    summary["inputs"] = {{"gamma", r.inputs.gamma_r}, {"alpha", r.inputs.alpha}, {"eta", r.inputs.eta},
                         {"t_r_s", r.inputs.params.t_r}, {"t_d_s", r.inputs.params.t_d},
                         {"t_m_s", r.inputs.params.t_m}};
    summary["no_pulse"] = histogram_json(r.no_pulse);
    summary["pi"] = histogram_json(r.pi);
    summary["sqrt_fit"] = {{"amplitude", r.sqrt_fit.slope}, {"r_squared", r.sqrt_fit.r_squared}};
    o.warnings = r.warnings;
  } else if (cmd == "optimize") {
    const std::uint32_t id = target_spin(inv);
    const auto r = run_optimize(cfg, id, opts);
    const auto& res = r.result;
    {
      auto f = out.open("snr_grid.csv");
      fmt::print(f, "t_d_s,t_r_s,snr\n");
      const std::size_t n = res.axis.size();
      for (std::size_t ir = 0; ir < n; ++ir) {
        for (std::size_t id2 = 0; id2 <= ir; ++id2) {
          fmt::print(f, "{:.10g},{:.10g},{:.10g}\n", res.axis[id2], res.axis[ir], res.grid[ir * n + id2]);
        }
      }
    }
    summary["spin"] = id;
    summary["inputs"] = {{"gamma", r.inputs.gamma_r}, {"alpha", r.inputs.alpha}, {"eta", r.inputs.eta},
                         {"t_m_s", r.inputs.params.t_m}};
    summary["optimum"] = {{"t_d_s", res.t_d}, {"t_r_s", res.t_r}, {"snr", res.snr},
                          {"refined", res.refined}, {"unimodal", res.unimodal}};
    if (!res.unimodal) o.warnings.push_back("SNR not unimodal along t_d: grid optimum reported");
  } else if (cmd == "volume") {
    const auto r = run_volume(cfg, opts);
    summary["threshold_per_s"] = cfg.volume.threshold;
    summary["area_m2"] = r.area;
    summary["volume_m3"] = r.volume;
    summary["volume_um3"] = r.volume * 1e18;
    summary["extent_m"] = r.extent;
  } else if (cmd == "gmap") {
    const FieldMap g = run_gmap(cfg, opts);
    auto f = out.open("gmap.csv");
    g.write(f, "Hz", 1.0);
    summary["nx"] = g.nx();
    summary["ny"] = g.ny();
  } else {
    throw ConfigError(fmt::format("unknown command '{}'", cmd));
  }
  return o;
}

struct Finished {
  int code = kOk;
  RunManifest manifest;
};

// Runs one command into inv.out and writes summary.json and manifest.json.
Finished execute(const Invocation& inv, const std::vector<std::string>& argv) {
  Finished fin;
  RunManifest& m = fin.manifest;
  m.command = inv.command;
  m.arguments = argv;
  m.config = serialize_config(inv.config);
  m.config_hash = config_hash(inv.config);
  m.seed = inv.seed;
  m.workers = inv.workers;
  m.format = inv.format;
  m.strict = inv.strict;
  m.spin = inv.spin;
  m.tool_version = tool_version();
  m.started = utc_timestamp();

  std::optional<FieldMap> map;
  if (inv.config.field_map) {
    map = FieldMap::load(*inv.config.field_map);
    m.field_map_hash = file_hash(*inv.config.field_map);
  }

  OutputDir out(inv.out);
  json summary;
  summary["provenance"] = provenance(inv, m.field_map_hash);
  const Outcome o = run_command(inv, map ? &*map : nullptr, out, summary);
  summary["warnings"] = o.warnings;
  {
    auto f = out.open("summary.json");
    f << summary.dump(2) << "\n";
  }
  for (const auto& w : o.warnings) fmt::print(std::cerr, "warning: {}\n", w);

  if (o.nonconverged) {
    fin.code = kNonConvergence;
  } else if (inv.strict && !o.warnings.empty()) {
    fin.code = kStatistics;
  }
  for (const auto& name : out.files()) {
    const fs::path p = out.dir() / name;
    m.outputs.push_back({name, file_hash(p), fs::file_size(p)});
  }
  m.finished = utc_timestamp();
  m.exit_code = fin.code;
  m.save(out.dir() / "manifest.json");
  return fin;
}

int replay(const fs::path& manifest_path, std::optional<fs::path> out_dir) {
  const RunManifest old = RunManifest::load(manifest_path);
  Invocation inv;
  inv.command = old.command;
  inv.config = old.verified_config();
  inv.seed = old.seed;
  inv.workers = old.workers;
  inv.format = old.format;
  inv.strict = old.strict;
  inv.spin = old.spin;
  inv.out = out_dir ? *out_dir : manifest_path.parent_path() / "replay";
  if (inv.config.field_map && file_hash(*inv.config.field_map) != old.field_map_hash) {
    throw ConfigError(fmt::format("field map {} changed since the recorded run", *inv.config.field_map));
  }
  const Finished fin = execute(inv, old.arguments);
  std::size_t mismatches = 0;
  for (const auto& rec : old.outputs) {
    const auto it = std::find_if(fin.manifest.outputs.begin(), fin.manifest.outputs.end(),
                                 [&](const OutputFile& f) { return f.path == rec.path; });
    if (it == fin.manifest.outputs.end()) {
      fmt::print(std::cerr, "missing: {}\n", rec.path);
      ++mismatches;
    } else if (it->hash != rec.hash) {
      fmt::print(std::cerr, "differs: {}\n", rec.path);
      ++mismatches;
    }
  }
  if (fin.manifest.outputs.size() != old.outputs.size()) ++mismatches;
  fmt::print("replayed {} into {}: {} of {} outputs identical\n", old.command, inv.out.string(),
             old.outputs.size() - std::min(mismatches, old.outputs.size()), old.outputs.size());
  return mismatches == 0 ? fin.code : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-spin photon-counting experiments: simulate, analyze, report."};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::string out = "out";
  bool strict = false;
  std::string format = "text";
  std::optional<std::uint32_t> spin;
  app.add_option("--config", config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Root seed");
  app.add_option("--workers", workers, "Worker threads (0: all cores)");
  app.add_option("--out", out, "Output directory");
  app.add_flag("--strict", strict, "Exit 4 on statistical-insufficiency warnings");
  app.add_option("--format", format, "Click stream format")->check(CLI::IsMember({"text", "binary"}));
  app.add_option("--spin", spin, "Target spin id (default: first spin in the config)");

  for (const auto& c : kCommands) app.add_subcommand(c, fmt::format("Run the {} experiment", c));
  auto* rp = app.add_subcommand("replay", "Re-run a recorded manifest and compare outputs");
  std::string manifest;
  std::optional<std::string> replay_out;
  rp->add_option("--manifest", manifest, "manifest.json of an earlier run")->required();
  rp->add_option("--replay-out", replay_out, "Directory for the replayed outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (rp->parsed()) return replay(manifest, replay_out ? std::optional<fs::path>(*replay_out) : std::nullopt);
    Invocation inv;
    inv.command = app.get_subcommands().front()->get_name();
    inv.config = config_path ? load_experiment_config_file(*config_path) : ExperimentConfig{};
    inv.seed = seed;
    inv.workers = workers;
    inv.format = format;
    inv.strict = strict;
    inv.spin = spin;
    inv.out = out;
    const std::vector<std::string> args(argv, argv + argc);
    const Finished fin = execute(inv, args);
    fmt::print("{}: wrote {} files to {} (exit {})\n", inv.command, fin.manifest.outputs.size() + 1,
               inv.out.string(), fin.code);
    return fin.code;
  } catch (const ValidationError& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const ConfigError& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const std::out_of_range& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kFailure;
  }
}
