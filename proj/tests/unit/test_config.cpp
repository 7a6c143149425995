#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spincount/config.hpp"
#include "spincount/manifest.hpp"
#include "spincount/units.hpp"

using namespace spincount;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string default_config_path() { return std::string(SPINCOUNT_SOURCE_DIR) + "/configs/default.json"; }

}  // namespace

TEST_CASE("unit suffixes") {
  using Q = Quantity;
  CHECK(parse_quantity("7.335 GHz", Q::kAngularFrequency) ==
        doctest::Approx(constants::kTwoPi * 7.335e9));
  CHECK(parse_quantity("470 kHz", Q::kFrequency) == doctest::Approx(470e3));
  CHECK(parse_quantity("1.7e6 rad/s", Q::kAngularFrequency) == doctest::Approx(1.7e6));
  CHECK(parse_quantity("106 /s", Q::kRate) == doctest::Approx(106.0));
  CHECK(parse_quantity("2 ms", Q::kTime) == doctest::Approx(2e-3));
  CHECK(parse_quantity("12.8 us", Q::kTime) == doctest::Approx(12.8e-6));
  CHECK(parse_quantity("257.3 nm", Q::kLength) == doctest::Approx(257.3e-9));
  CHECK(parse_quantity("420.3 mT", Q::kMagneticField) == doctest::Approx(0.4203));
  CHECK(parse_quantity("17.45 GHz/T", Q::kGyromagnetic) == doctest::Approx(constants::kGammaParallel));
  CHECK(parse_quantity("0.5 deg", Q::kAngle) == doctest::Approx(0.5 * constants::kPi / 180));
  CHECK(parse_quantity("42 mK", Q::kTemperature) == doctest::Approx(0.042));
  CHECK(parse_quantity("3.1 ppb", Q::kDimensionless) == doctest::Approx(3.1e-9));
  CHECK(parse_quantity("0.32", Q::kDimensionless) == doctest::Approx(0.32));

  CHECK_THROWS_AS(parse_quantity("106 Hz", Q::kRate), ConfigError);
  CHECK_THROWS_AS(parse_quantity("2 mT", Q::kTime), ConfigError);
  CHECK_THROWS_AS(parse_quantity("fast", Q::kTime), ConfigError);
  CHECK_THROWS_AS(parse_quantity("2", Q::kTime), ConfigError);
}

TEST_CASE("format_quantity round-trips exactly") {
  for (double v : {1.0, 0.1, 4.6087e10, 1.0 / 3.0, 2.5e-9}) {
    for (Quantity q : {Quantity::kAngularFrequency, Quantity::kTime, Quantity::kLength,
                       Quantity::kMagneticField, Quantity::kDimensionless}) {
      CHECK(parse_quantity(format_quantity(v, q), q) == v);
    }
  }
}

TEST_CASE("default config loads and round-trips") {
  const auto c = load_experiment_config_file(default_config_path());
  CHECK(c.spins.size() == 2);
  CHECK(c.resonator.omega0 == doctest::Approx(constants::kTwoPi * 7.335e9));
  CHECK(c.spin(6).position.y == doctest::Approx(265.1e-9));
  CHECK_THROWS_AS(c.spin(99), std::out_of_range);

  const auto text = serialize_config(c);
  const auto back = load_experiment_config(text);
  CHECK(back == c);
  CHECK(serialize_config(back) == text);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);

  auto changed = c;
  changed.detector.dark_rate = 107.0;
  CHECK(config_hash(changed) != config_hash(c));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(load_experiment_config("{ not json"), ConfigError);
  CHECK_THROWS_AS(load_experiment_config(R"({"resonator": {"omega_zero": "7 GHz"}})"), ConfigError);
  CHECK_THROWS_AS(load_experiment_config(R"({"detector": {"dark_rate": 106}})"), ConfigError);
  CHECK_THROWS_AS(load_experiment_config(R"({"spectroscopy": {"source": "file"}})"), ValidationError);
  try {
    load_experiment_config(R"({"detector": {"eta_smpd": 1.5}})");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "eta_smpd");
  }
  try {
    load_experiment_config(R"({"protocol": {"t_r": "1 ms", "t_d": "2 ms"}})");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "t_d");
  }
}

TEST_CASE("empty document takes defaults") {
  const auto c = load_experiment_config("{}");
  CHECK(c == ExperimentConfig{});
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("manifest round trip and config verification") {
  const auto c = load_experiment_config_file(default_config_path());
  RunManifest m;
  m.command = "snr";
  m.arguments = {"--seed", "18446744073709551615", "snr"};
  m.config = serialize_config(c);
  m.config_hash = config_hash(c);
  m.seed = 18446744073709551615ull;
  m.workers = 3;
  m.spin = 6;
  m.tool_version = tool_version();
  m.started = utc_timestamp();
  m.finished = m.started;
  m.outputs = {{"snr_vs_tm.csv", "0123456789abcdef", 42}};

  const auto back = RunManifest::from_json(m.to_json());
  CHECK(back.command == m.command);
  CHECK(back.arguments == m.arguments);
  CHECK(back.seed == m.seed);
  CHECK(back.spin == m.spin);
  CHECK(back.outputs == m.outputs);
  CHECK(back.verified_config() == c);

  const auto dir = std::filesystem::temp_directory_path() / "spincount_manifest_test";
  std::filesystem::create_directories(dir);
  m.save(dir / "manifest.json");
  CHECK(RunManifest::load(dir / "manifest.json").to_json() == m.to_json());
  CHECK(file_hash(dir / "manifest.json") == fnv1a_hex(read_file((dir / "manifest.json").string())));
  std::filesystem::remove_all(dir);

  auto tampered = m;
  tampered.config_hash = "0000000000000000";
  CHECK_THROWS_AS(tampered.verified_config(), ConfigError);
  CHECK_THROWS_AS(RunManifest::from_json("[1, 2]"), ConfigError);
}
