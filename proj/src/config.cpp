#include "spincount/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "spincount/physics.hpp"

namespace spincount {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(fmt::format("{}: expected an object", name()));
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json* take(const std::string& key) {
    if (!node_.contains(key)) return nullptr;
    seen_.insert(key);
    return &node_.at(key);
  }

  void quantity(const std::string& key, Quantity q, double& out) {
    if (const json* v = take(key)) out = parse_value(*v, q, key);
  }

  void flag(const std::string& key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) throw ConfigError(fmt::format("{}: expected true/false", where(key)));
      out = v->get<bool>();
    }
  }

  void count(const std::string& key, std::size_t& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0) {
        throw ConfigError(fmt::format("{}: expected a non-negative integer", where(key)));
      }
      out = v->get<std::size_t>();
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) throw ConfigError(fmt::format("{}: expected an integer", where(key)));
      out = v->get<int>();
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(fmt::format("{}: expected a string", where(key)));
      out = v->get<std::string>();
    }
  }

  void list(const std::string& key, Quantity q, std::vector<double>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) throw ConfigError(fmt::format("{}: expected a list", where(key)));
      out.clear();
      for (const auto& item : *v) out.push_back(parse_value(item, q, key));
    }
  }

  void pair(const std::string& key, Quantity q, double& first, double& second) {
    if (has(key)) {
      std::vector<double> values;
      list(key, q, values);
      if (values.size() != 2) throw ConfigError(fmt::format("{}: expected [min, max]", where(key)));
      first = values[0];
      second = values[1];
    }
  }

  void vec3(const std::string& key, Quantity q, Vec3& out) {
    if (has(key)) {
      std::vector<double> values;
      list(key, q, values);
      if (values.size() != 3) throw ConfigError(fmt::format("{}: expected [x, y, z]", where(key)));
      out = {values[0], values[1], values[2]};
    }
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) throw ConfigError(fmt::format("unknown key '{}'", where(key)));
    }
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string name() const { return path_.empty() ? "<root>" : path_; }

 private:
  double parse_value(const json& v, Quantity q, const std::string& key) const {
    try {
      if (v.is_string()) return parse_quantity(v.get<std::string>(), q);
      if (v.is_number() && q == Quantity::kDimensionless) return v.get<double>();
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}: {}", where(key), e.what()));
    }
    if (v.is_number()) {
      throw ConfigError(fmt::format("{}: needs an explicit unit suffix ({})", where(key),
                                    quantity_name(q)));
    }
    throw ConfigError(fmt::format("{}: expected a quantity string", where(key)));
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Fn>
void with_section(Section& root, const std::string& key, Fn&& fn) {
  if (const json* node = root.take(key)) {
    Section s(*node, root.where(key));
    fn(s);
    s.finish();
  }
}

void read_coherence(Section& s, CoherenceSettings& c) {
  s.quantity("tau_start", Quantity::kTime, c.tau_start);
  s.quantity("tau_stop", Quantity::kTime, c.tau_stop);
  s.count("points", c.points);
  s.quantity("phase_ramp", Quantity::kFrequency, c.phase_ramp);
  s.quantity("pulse_duration", Quantity::kTime, c.pulse_duration);
  s.integer("detuning_sign", c.detuning_sign);
  s.count("sequences", c.sequences);
  s.quantity("repetition", Quantity::kTime, c.repetition);
  s.quantity("window", Quantity::kTime, c.window);
}

SpinCenter read_spin(const json& node, const std::string& path, const ExperimentConfig& cfg) {
  Section s(node, path);
  SpinCenter spin;
  std::size_t id = 0;
  if (!s.has("id")) throw ConfigError(fmt::format("{}: missing 'id'", path));
  s.count("id", id);
  spin.id = static_cast<std::uint32_t>(id);
  s.vec3("position", Quantity::kLength, spin.position);
  s.quantity("gamma_parallel", Quantity::kGyromagnetic, spin.tensor.gamma_parallel);
  s.quantity("gamma_perp", Quantity::kGyromagnetic, spin.tensor.gamma_perp);
  if (s.has("tilt")) {
    std::vector<double> tilt;
    s.list("tilt", Quantity::kAngle, tilt);
    if (tilt.size() != 2) throw ConfigError(fmt::format("{}.tilt: expected [a, b]", path));
    spin.tensor.axis_tilt = {tilt[0], tilt[1]};
  }
  s.quantity("t2_star", Quantity::kTime, spin.t2_star);
  s.quantity("t2_echo", Quantity::kTime, spin.t2_echo);
  spin.t2_pdd = spin.t2_echo;
  s.quantity("t2_pdd", Quantity::kTime, spin.t2_pdd);
  if (s.has("gamma_nr")) {
    s.quantity("gamma_nr", Quantity::kRate, spin.gamma_nr);
  } else {
    const double b_res = cfg.resonator.omega0 / spin.tensor.gamma_parallel;
    spin.gamma_nr = nonradiative_rate(cfg.nonradiative, b_res, cfg.resonator.omega0);
  }
  s.finish();
  return spin;
}

json spin_to_json(const SpinCenter& spin) {
  const auto L = Quantity::kLength;
  return json{
      {"id", spin.id},
      {"position",
       {format_quantity(spin.position.x, L), format_quantity(spin.position.y, L),
        format_quantity(spin.position.z, L)}},
      {"gamma_parallel", format_quantity(spin.tensor.gamma_parallel, Quantity::kGyromagnetic)},
      {"gamma_perp", format_quantity(spin.tensor.gamma_perp, Quantity::kGyromagnetic)},
      {"tilt",
       {format_quantity(spin.tensor.axis_tilt.a, Quantity::kAngle),
        format_quantity(spin.tensor.axis_tilt.b, Quantity::kAngle)}},
      {"t2_star", format_quantity(spin.t2_star, Quantity::kTime)},
      {"t2_echo", format_quantity(spin.t2_echo, Quantity::kTime)},
      {"t2_pdd", format_quantity(spin.t2_pdd, Quantity::kTime)},
      {"gamma_nr", format_quantity(spin.gamma_nr, Quantity::kRate)},
  };
}

json list_to_json(const std::vector<double>& values, Quantity q) {
  json out = json::array();
  for (double v : values) out.push_back(format_quantity(v, q));
  return out;
}

json coherence_to_json(const CoherenceSettings& c) {
  return json{
      {"tau_start", format_quantity(c.tau_start, Quantity::kTime)},
      {"tau_stop", format_quantity(c.tau_stop, Quantity::kTime)},
      {"points", c.points},
      {"phase_ramp", format_quantity(c.phase_ramp, Quantity::kFrequency)},
      {"pulse_duration", format_quantity(c.pulse_duration, Quantity::kTime)},
      {"detuning_sign", c.detuning_sign},
      {"sequences", c.sequences},
      {"repetition", format_quantity(c.repetition, Quantity::kTime)},
      {"window", format_quantity(c.window, Quantity::kTime)},
  };
}

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ValidationError(field, what);
}

void validate_coherence(const CoherenceSettings& c, const char* name) {
  require(c.tau_start >= 0.0 && c.tau_stop >= c.tau_start, name, "needs 0 <= tau_start <= tau_stop");
  require(c.points >= 1, name, "points must be >= 1");
  require(c.pulse_duration > 0.0, name, "pulse_duration must be > 0");
  require(c.detuning_sign == 1 || c.detuning_sign == -1, name, "detuning_sign must be +1 or -1");
  require(c.sequences >= 1, name, "sequences must be >= 1");
  require(c.repetition > 0.0 && c.window > 0.0, name, "repetition and window must be > 0");
}

}  // namespace

void ExperimentConfig::validate() const {
  resonator.validate();
  detector.validate();
  field.validate();
  protocol.validate();
  crystal.validate();
  ensemble.validate();
  heating.validate();
  nonradiative.validate();
  std::set<std::uint32_t> ids;
  for (const auto& s : spins) {
    s.validate();
    require(ids.insert(s.id).second, "spins", "spin ids must be unique");
  }
  const auto& sp = spectroscopy;
  require(sp.points >= 1 && sp.theta_points >= 1, "spectroscopy", "points must be >= 1");
  require(sp.b0_start >= 0.0 && sp.b0_stop >= sp.b0_start, "spectroscopy",
          "needs 0 <= b0_start <= b0_stop");
  require(std::abs(sp.theta_start) < constants::kPi / 2 && std::abs(sp.theta_stop) < constants::kPi / 2,
          "spectroscopy", "|theta| must be < pi/2");
  require(sp.sequences >= 1, "spectroscopy", "sequences must be >= 1");
  require(sp.repetition > 0.0 && sp.window > 0.0 && sp.window <= sp.repetition, "spectroscopy",
          "needs 0 < window <= repetition");
  require(sp.pulse_duration > 0.0, "spectroscopy", "pulse_duration must be > 0");
  require(sp.low_power_threshold >= 0.0, "spectroscopy", "low_power_threshold must be >= 0");
  require(rabi.points >= 1 && !rabi.amplitudes.empty(), "rabi", "needs points and amplitudes");
  require(rabi.duration_start >= 0.0 && rabi.duration_stop >= rabi.duration_start, "rabi",
          "needs 0 <= duration_start <= duration_stop");
  require(rabi.sequences >= 1 && rabi.repetition > 0.0 && rabi.window > 0.0, "rabi",
          "sequences, repetition and window must be positive");
  validate_coherence(ramsey, "ramsey");
  validate_coherence(hahn, "hahn");
  validate_coherence(pdd, "pdd");
  require(t1.sequences >= 1 && t1.repetition > 0.0 && t1.bin_width > 0.0 && t1.exclusion >= 0.0,
          "t1", "sequences, repetition, bin_width must be positive");
  require(!t1.detunings.empty(), "t1", "detunings must not be empty");
  require(g2.sequences >= 1 && g2.bins >= 2 && g2.bin_width > 0.0 && g2.exclusion >= 0.0, "g2",
          "needs sequences >= 1, bins >= 2, bin_width > 0");
  require(g2.emitters >= 1 && g2.bootstrap >= 2, "g2", "needs emitters >= 1, bootstrap >= 2");
  require(!snr.measurement_times.empty() && snr.total_time > 0.0, "snr",
          "needs measurement_times and total_time");
  for (double t : snr.measurement_times) require(t > 0.0, "snr", "measurement_times must be > 0");
  require(optimize.t_min > 0.0 && optimize.t_max > optimize.t_min && optimize.grid >= 2 &&
              optimize.tolerance > 0.0,
          "optimize", "needs 0 < t_min < t_max, grid >= 2, tolerance > 0");
  require(volume.threshold > 0.0 && volume.base_grid > 0.0, "volume",
          "threshold and base_grid must be > 0");
  require(gmap.nx >= 2 && gmap.ny >= 2 && gmap.x_max > gmap.x_min && gmap.y_max > gmap.y_min,
          "gmap", "needs a non-degenerate grid");
}

const SpinCenter& ExperimentConfig::spin(std::uint32_t id) const {
  const auto it = std::find_if(spins.begin(), spins.end(),
                               [id](const SpinCenter& s) { return s.id == id; });
  if (it == spins.end()) throw std::out_of_range(fmt::format("unknown spin id {}", id));
  return *it;
}

ExperimentConfig load_experiment_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("parse error: {}", e.what()));
  }

  ExperimentConfig cfg;
  Section root(doc, "");
  using Q = Quantity;

  with_section(root, "resonator", [&](Section& s) {
    auto& r = cfg.resonator;
    s.quantity("omega0", Q::kAngularFrequency, r.omega0);
    s.quantity("kappa_c", Q::kAngularFrequency, r.kappa_c);
    s.quantity("kappa_i", Q::kAngularFrequency, r.kappa_i);
    s.quantity("impedance", Q::kImpedance, r.impedance);
    s.quantity("wire_length", Q::kLength, r.wire_length);
    s.quantity("wire_width", Q::kLength, r.wire_width);
    s.quantity("wire_thickness", Q::kLength, r.wire_thickness);
    s.quantity("inductance_participation", Q::kDimensionless, r.inductance_participation);
    s.quantity("field_cutoff", Q::kLength, r.field_cutoff);
  });
  with_section(root, "detector", [&](Section& s) {
    auto& d = cfg.detector;
    s.quantity("eta_smpd", Q::kDimensionless, d.eta_smpd);
    s.quantity("dark_rate", Q::kRate, d.dark_rate);
    s.quantity("cycle_duration", Q::kTime, d.cycle_duration);
    s.quantity("detection_window", Q::kTime, d.detection_window);
    s.quantity("readout_duration", Q::kTime, d.readout_duration);
    s.quantity("bandwidth_fwhm", Q::kFrequency, d.bandwidth_fwhm);
    s.quantity("saturation_flux", Q::kRate, d.saturation_flux);
    s.quantity("eta_loss", Q::kDimensionless, d.eta_loss);
    s.flag("explicit_dead_time", d.explicit_dead_time);
  });
  with_section(root, "field", [&](Section& s) {
    s.quantity("B0", Q::kMagneticField, cfg.field.b0);
    s.quantity("theta", Q::kAngle, cfg.field.theta);
    s.quantity("beta", Q::kAngle, cfg.field.beta);
  });
  with_section(root, "protocol", [&](Section& s) {
    s.quantity("t_r", Q::kTime, cfg.protocol.t_r);
    s.quantity("t_d", Q::kTime, cfg.protocol.t_d);
    s.quantity("t_m", Q::kTime, cfg.protocol.t_m);
  });
  with_section(root, "crystal", [&](Section& s) {
    auto& c = cfg.crystal;
    s.quantity("lattice_a", Q::kLength, c.lattice_a);
    s.quantity("lattice_c", Q::kLength, c.lattice_c);
    s.quantity("sites_per_cell", Q::kDimensionless, c.sites_per_cell);
    s.quantity("concentration", Q::kDimensionless, c.er_concentration);
    s.vec3("box", Q::kLength, c.detection_box);
  });
  with_section(root, "ensemble", [&](Section& s) {
    auto& e = cfg.ensemble;
    s.quantity("linewidth", Q::kMagneticField, e.linewidth_fwhm);
    std::string shape(to_string(e.shape));
    s.text("shape", shape);
    e.shape = line_shape_from_string(shape);
    s.quantity("truncation", Q::kDimensionless, e.truncation);
    s.quantity("gamma_perp_spread", Q::kDimensionless, e.gamma_perp_spread);
    s.quantity("tilt_spread", Q::kAngle, e.tilt_spread);
    s.pair("t2_star_range", Q::kTime, e.t2_star_min, e.t2_star_max);
    s.pair("t2_echo_range", Q::kTime, e.t2_echo_min, e.t2_echo_max);
  });
  with_section(root, "heating", [&](Section& s) {
    auto& h = cfg.heating;
    s.quantity("amplitude", Q::kDimensionless, h.amplitude);
    s.quantity("decay_time", Q::kTime, h.decay_time);
    s.quantity("offset_counts", Q::kDimensionless, h.offset_counts);
    s.quantity("buildup_time", Q::kTime, h.buildup_time);
  });
  with_section(root, "nonradiative", [&](Section& s) {
    s.quantity("reference_t1", Q::kTime, cfg.nonradiative.t1);
    s.quantity("reference_frequency", Q::kAngularFrequency, cfg.nonradiative.omega);
  });
  if (const json* fm = root.take("field_map")) {
    if (!fm->is_string()) throw ConfigError("field_map: expected a path string");
    cfg.field_map = fm->get<std::string>();
  }

  with_section(root, "spectroscopy", [&](Section& s) {
    auto& sp = cfg.spectroscopy;
    std::string power = sp.power == PowerMode::kHigh ? "high" : "low";
    s.text("power", power);
    if (power != "high" && power != "low") {
      throw ValidationError("spectroscopy.power", "must be 'high' or 'low'");
    }
    sp.power = power == "high" ? PowerMode::kHigh : PowerMode::kLow;
    s.quantity("B0_start", Q::kMagneticField, sp.b0_start);
    s.quantity("B0_stop", Q::kMagneticField, sp.b0_stop);
    s.count("points", sp.points);
    s.quantity("theta_start", Q::kAngle, sp.theta_start);
    s.quantity("theta_stop", Q::kAngle, sp.theta_stop);
    s.count("theta_points", sp.theta_points);
    s.flag("theta_linked", sp.theta_linked);
    s.count("sequences", sp.sequences);
    s.quantity("repetition", Q::kTime, sp.repetition);
    s.quantity("window", Q::kTime, sp.window);
    s.quantity("pulse_duration", Q::kTime, sp.pulse_duration);
    s.quantity("low_power_threshold", Q::kRate, sp.low_power_threshold);
    std::string source = sp.use_config_spins ? "config" : "ensemble";
    s.text("source", source);
    if (source != "config" && source != "ensemble") {
      throw ValidationError("spectroscopy.source", "must be 'ensemble' or 'config'");
    }
    sp.use_config_spins = source == "config";
  });
  with_section(root, "rabi", [&](Section& s) {
    auto& r = cfg.rabi;
    s.quantity("duration_start", Q::kTime, r.duration_start);
    s.quantity("duration_stop", Q::kTime, r.duration_stop);
    s.count("points", r.points);
    s.list("amplitudes", Q::kDimensionless, r.amplitudes);
    s.quantity("rabi_coeff", Q::kAngularFrequency, r.rabi_coeff);
    s.count("sequences", r.sequences);
    s.quantity("repetition", Q::kTime, r.repetition);
    s.quantity("window", Q::kTime, r.window);
  });
  with_section(root, "ramsey", [&](Section& s) { read_coherence(s, cfg.ramsey); });
  with_section(root, "hahn", [&](Section& s) { read_coherence(s, cfg.hahn); });
  with_section(root, "pdd", [&](Section& s) { read_coherence(s, cfg.pdd); });
  with_section(root, "t1", [&](Section& s) {
    auto& t = cfg.t1;
    s.count("sequences", t.sequences);
    s.quantity("repetition", Q::kTime, t.repetition);
    s.quantity("bin_width", Q::kTime, t.bin_width);
    s.quantity("exclusion", Q::kTime, t.exclusion);
    s.list("detunings", Q::kAngularFrequency, t.detunings);
    s.flag("fit_kappa", t.fit_kappa);
  });
  with_section(root, "g2", [&](Section& s) {
    auto& g = cfg.g2;
    s.count("sequences", g.sequences);
    s.quantity("repetition", Q::kTime, g.repetition);
    s.quantity("exclusion", Q::kTime, g.exclusion);
    s.quantity("bin_width", Q::kTime, g.bin_width);
    s.count("bins", g.bins);
    s.count("max_lag", g.max_lag);
    s.count("bootstrap", g.bootstrap);
    s.count("emitters", g.emitters);
  });
  with_section(root, "snr", [&](Section& s) {
    s.list("measurement_times", Q::kTime, cfg.snr.measurement_times);
    s.quantity("total_time", Q::kTime, cfg.snr.total_time);
  });
  with_section(root, "optimize", [&](Section& s) {
    s.quantity("t_min", Q::kTime, cfg.optimize.t_min);
    s.quantity("t_max", Q::kTime, cfg.optimize.t_max);
    s.count("grid", cfg.optimize.grid);
    s.quantity("tolerance", Q::kDimensionless, cfg.optimize.tolerance);
  });
  with_section(root, "volume", [&](Section& s) {
    s.quantity("threshold", Q::kRate, cfg.volume.threshold);
    s.quantity("base_grid", Q::kLength, cfg.volume.base_grid);
  });
  with_section(root, "gmap", [&](Section& s) {
    s.quantity("x_min", Q::kLength, cfg.gmap.x_min);
    s.quantity("x_max", Q::kLength, cfg.gmap.x_max);
    s.quantity("y_min", Q::kLength, cfg.gmap.y_min);
    s.quantity("y_max", Q::kLength, cfg.gmap.y_max);
    s.count("nx", cfg.gmap.nx);
    s.count("ny", cfg.gmap.ny);
  });

  // Spins last: their default non-radiative rate depends on the resonator
  // and reference sections.
  if (const json* spins = root.take("spins")) {
    if (!spins->is_array()) throw ConfigError("spins: expected a list");
    for (std::size_t i = 0; i < spins->size(); ++i) {
      cfg.spins.push_back(read_spin((*spins)[i], fmt::format("spins[{}]", i), cfg));
    }
  }
  root.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_experiment_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  using Q = Quantity;
  const auto q = [](double v, Q kind) { return format_quantity(v, kind); };
  const auto& r = cfg.resonator;
  const auto& d = cfg.detector;
  const auto& c = cfg.crystal;
  const auto& e = cfg.ensemble;
  const auto& h = cfg.heating;
  const auto& sp = cfg.spectroscopy;

  json doc;
  doc["resonator"] = {
      {"omega0", q(r.omega0, Q::kAngularFrequency)},
      {"kappa_c", q(r.kappa_c, Q::kAngularFrequency)},
      {"kappa_i", q(r.kappa_i, Q::kAngularFrequency)},
      {"impedance", q(r.impedance, Q::kImpedance)},
      {"wire_length", q(r.wire_length, Q::kLength)},
      {"wire_width", q(r.wire_width, Q::kLength)},
      {"wire_thickness", q(r.wire_thickness, Q::kLength)},
      {"inductance_participation", q(r.inductance_participation, Q::kDimensionless)},
      {"field_cutoff", q(r.field_cutoff, Q::kLength)},
  };
  doc["detector"] = {
      {"eta_smpd", q(d.eta_smpd, Q::kDimensionless)},
      {"dark_rate", q(d.dark_rate, Q::kRate)},
      {"cycle_duration", q(d.cycle_duration, Q::kTime)},
      {"detection_window", q(d.detection_window, Q::kTime)},
      {"readout_duration", q(d.readout_duration, Q::kTime)},
      {"bandwidth_fwhm", q(d.bandwidth_fwhm, Q::kFrequency)},
      {"saturation_flux", q(d.saturation_flux, Q::kRate)},
      {"eta_loss", q(d.eta_loss, Q::kDimensionless)},
      {"explicit_dead_time", d.explicit_dead_time},
  };
  doc["field"] = {{"B0", q(cfg.field.b0, Q::kMagneticField)},
                  {"theta", q(cfg.field.theta, Q::kAngle)},
                  {"beta", q(cfg.field.beta, Q::kAngle)}};
  doc["protocol"] = {{"t_r", q(cfg.protocol.t_r, Q::kTime)},
                     {"t_d", q(cfg.protocol.t_d, Q::kTime)},
                     {"t_m", q(cfg.protocol.t_m, Q::kTime)}};
  doc["crystal"] = {
      {"lattice_a", q(c.lattice_a, Q::kLength)},
      {"lattice_c", q(c.lattice_c, Q::kLength)},
      {"sites_per_cell", q(c.sites_per_cell, Q::kDimensionless)},
      {"concentration", q(c.er_concentration, Q::kDimensionless)},
      {"box",
       {q(c.detection_box.x, Q::kLength), q(c.detection_box.y, Q::kLength),
        q(c.detection_box.z, Q::kLength)}},
  };
  doc["ensemble"] = {
      {"linewidth", q(e.linewidth_fwhm, Q::kMagneticField)},
      {"shape", std::string(to_string(e.shape))},
      {"truncation", q(e.truncation, Q::kDimensionless)},
      {"gamma_perp_spread", q(e.gamma_perp_spread, Q::kDimensionless)},
      {"tilt_spread", q(e.tilt_spread, Q::kAngle)},
      {"t2_star_range", {q(e.t2_star_min, Q::kTime), q(e.t2_star_max, Q::kTime)}},
      {"t2_echo_range", {q(e.t2_echo_min, Q::kTime), q(e.t2_echo_max, Q::kTime)}},
  };
  doc["heating"] = {{"amplitude", q(h.amplitude, Q::kDimensionless)},
                    {"decay_time", q(h.decay_time, Q::kTime)},
                    {"offset_counts", q(h.offset_counts, Q::kDimensionless)},
                    {"buildup_time", q(h.buildup_time, Q::kTime)}};
  doc["nonradiative"] = {{"reference_t1", q(cfg.nonradiative.t1, Q::kTime)},
                         {"reference_frequency", q(cfg.nonradiative.omega, Q::kAngularFrequency)}};
  if (cfg.field_map) doc["field_map"] = *cfg.field_map;
  doc["spectroscopy"] = {
      {"power", sp.power == PowerMode::kHigh ? "high" : "low"},
      {"B0_start", q(sp.b0_start, Q::kMagneticField)},
      {"B0_stop", q(sp.b0_stop, Q::kMagneticField)},
      {"points", sp.points},
      {"theta_start", q(sp.theta_start, Q::kAngle)},
      {"theta_stop", q(sp.theta_stop, Q::kAngle)},
      {"theta_points", sp.theta_points},
      {"theta_linked", sp.theta_linked},
      {"sequences", sp.sequences},
      {"repetition", q(sp.repetition, Q::kTime)},
      {"window", q(sp.window, Q::kTime)},
      {"pulse_duration", q(sp.pulse_duration, Q::kTime)},
      {"low_power_threshold", q(sp.low_power_threshold, Q::kRate)},
      {"source", sp.use_config_spins ? "config" : "ensemble"},
  };
  doc["rabi"] = {
      {"duration_start", q(cfg.rabi.duration_start, Q::kTime)},
      {"duration_stop", q(cfg.rabi.duration_stop, Q::kTime)},
      {"points", cfg.rabi.points},
      {"amplitudes", list_to_json(cfg.rabi.amplitudes, Q::kDimensionless)},
      {"rabi_coeff", q(cfg.rabi.rabi_coeff, Q::kAngularFrequency)},
      {"sequences", cfg.rabi.sequences},
      {"repetition", q(cfg.rabi.repetition, Q::kTime)},
      {"window", q(cfg.rabi.window, Q::kTime)},
  };
  doc["ramsey"] = coherence_to_json(cfg.ramsey);
  doc["hahn"] = coherence_to_json(cfg.hahn);
  doc["pdd"] = coherence_to_json(cfg.pdd);
  doc["t1"] = {
      {"sequences", cfg.t1.sequences},
      {"repetition", q(cfg.t1.repetition, Q::kTime)},
      {"bin_width", q(cfg.t1.bin_width, Q::kTime)},
      {"exclusion", q(cfg.t1.exclusion, Q::kTime)},
      {"detunings", list_to_json(cfg.t1.detunings, Q::kAngularFrequency)},
      {"fit_kappa", cfg.t1.fit_kappa},
  };
  doc["g2"] = {
      {"sequences", cfg.g2.sequences},
      {"repetition", q(cfg.g2.repetition, Q::kTime)},
      {"exclusion", q(cfg.g2.exclusion, Q::kTime)},
      {"bin_width", q(cfg.g2.bin_width, Q::kTime)},
      {"bins", cfg.g2.bins},
      {"max_lag", cfg.g2.max_lag},
      {"bootstrap", cfg.g2.bootstrap},
      {"emitters", cfg.g2.emitters},
  };
  doc["snr"] = {{"measurement_times", list_to_json(cfg.snr.measurement_times, Q::kTime)},
                {"total_time", q(cfg.snr.total_time, Q::kTime)}};
  doc["optimize"] = {{"t_min", q(cfg.optimize.t_min, Q::kTime)},
                     {"t_max", q(cfg.optimize.t_max, Q::kTime)},
                     {"grid", cfg.optimize.grid},
                     {"tolerance", q(cfg.optimize.tolerance, Q::kDimensionless)}};
  doc["volume"] = {{"threshold", q(cfg.volume.threshold, Q::kRate)},
                   {"base_grid", q(cfg.volume.base_grid, Q::kLength)}};
  doc["gmap"] = {{"x_min", q(cfg.gmap.x_min, Q::kLength)}, {"x_max", q(cfg.gmap.x_max, Q::kLength)},
                 {"y_min", q(cfg.gmap.y_min, Q::kLength)}, {"y_max", q(cfg.gmap.y_max, Q::kLength)},
                 {"nx", cfg.gmap.nx},
                 {"ny", cfg.gmap.ny}};
  json spins = json::array();
  for (const auto& s : cfg.spins) spins.push_back(spin_to_json(s));
  doc["spins"] = std::move(spins);
  return doc.dump(2) + "\n";
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string config_hash(const ExperimentConfig& config) { return fnv1a_hex(serialize_config(config)); }

}  // namespace spincount
