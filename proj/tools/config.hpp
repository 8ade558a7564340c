#pragma once

#include "cdtrade/calibration.hpp"
#include "cdtrade/qubit_model.hpp"
#include "cdtrade/shot_sampler.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cdtrade::cli {

inline constexpr const char* kConfigSchema = "cdtrade-config/1";

/// Malformed, unknown or unit-ambiguous configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { Scan, Calibrate, Detector, SearchOptimal, Highdim };

Mode parse_mode(const std::string& name);
std::string to_string(Mode mode);

struct TargetSpec {
  double gamma = 1.0;
  double bias = 0.0;
  std::vector<double> thetas;  // radians
};

struct SearchSpec {
  double probe_theta = 0.785398163397448309616;  // pi / 4
  double probe_gamma = 1.0;
  double probe_bias = 0.0;
  double target_theta = 0.0;                     // x axis
  double target_gamma = 1.0;
  std::size_t count = 64;
};

struct HighdimSpec {
  int dim = 3;
  double target_gamma = 1.0;
  std::size_t count = 17;
};

struct DetectorSpec {
  std::optional<double> eta, nu;        // simulate
  std::optional<double> d1, c2;         // invert
  double d1_err = 0.0, c2_err = 0.0;
};

struct CalibrateSpec {
  std::filesystem::path scan;
  FitMethod method = FitMethod::Circle;
  std::optional<double> target_strength;
  std::optional<std::filesystem::path> reference_scan;
  std::size_t bootstrap = 200;
};

struct Config {
  Mode mode = Mode::Scan;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> shots;  // empty means exact
  InstrumentPolicy policy = InstrumentPolicy::Lueders;
  QubitMeasurement probe{0.0, Vec3(1.0, 0.0, 0.0)};
  TargetSpec target;
  std::optional<Vec3> state;  // empty means optimal
  SearchSpec search;
  HighdimSpec highdim;
  DetectorSpec detector;
  CalibrateSpec calibrate;

  nlohmann::json raw;  // effective config after overrides, as written to sidecars
};

struct Overrides {
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  bool exact = false;
};

/// Parses and validates; relative paths resolve against base_dir.
Config parse_config(nlohmann::json doc, const Overrides& overrides,
                    const std::filesystem::path& base_dir);

Config load_config(const std::filesystem::path& path, const Overrides& overrides);

std::string sha256_hex(std::string_view bytes);

/// Hex SHA-256 of the canonical dump of the effective config.
std::string config_hash(const nlohmann::json& effective);

}  // namespace cdtrade::cli
