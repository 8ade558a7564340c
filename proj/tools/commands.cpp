#include "commands.hpp"

#include "cdtrade/detector_model.hpp"
#include "cdtrade/error.hpp"
#include "cdtrade/highdim_model.hpp"
#include "cdtrade/parallel.hpp"
#include "cdtrade/version.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace cdtrade::cli {

namespace {

using nlohmann::json;

constexpr const char* kScanColumns = "c,d,c_err,d_err,c2d2";

// Adding +0.0 folds -0 into 0 so rows never print "-0".
std::string num(double x) { return fmt::format("{:.9g}", x + 0.0); }

ScanRow exact_row(double x, const CdValue& v) { return {x, v.correlation, v.disturbance, 0.0, 0.0}; }

ScanRow shot_row(double x, const ExperimentModel& model, std::uint64_t shots, std::uint64_t seed) {
  const auto est = estimate_cd(sample(model, shots, shots, seed));
  return {x, est.c_hat, est.d_hat, est.c_err, est.d_err};
}

// Exact rows of Lueders runs go through the instrument formalism directly;
// other policies and shot runs go through the two-arm model.
ScanRow qubit_row(const Config& cfg, std::size_t k, double x, const DensityMatrix& rho,
                  const QubitMeasurement& probe, const Povm& target) {
  if (!cfg.shots) {
    if (cfg.policy == InstrumentPolicy::Lueders) {
      return exact_row(x, cd_from_scenario(rho, probe.instrument(), target));
    }
    return exact_row(x, exact_cd(experiment_model(rho, probe, cfg.policy, target)));
  }
  return shot_row(x, experiment_model(rho, probe, cfg.policy, target), *cfg.shots,
                  stream_seed(cfg.seed, k));
}

std::string sidecar(const Config& cfg, const std::string& first_column, std::size_t rows) {
  json out;
  out["schema"] = "cdtrade-scan/1";
  out["version"] = kVersion;
  out["mode"] = to_string(cfg.mode);
  out["columns"] = json::array({first_column, "c", "d", "c_err", "d_err", "c2d2"});
  out["rows"] = rows;
  out["config"] = cfg.raw;
  out["config_hash"] = config_hash(cfg.raw);
  return out.dump(2) + "\n";
}

json report_header(const Config& cfg) {
  json out;
  out["schema"] = "cdtrade-report/1";
  out["version"] = kVersion;
  out["mode"] = to_string(cfg.mode);
  out["config"] = cfg.raw;
  out["config_hash"] = config_hash(cfg.raw);
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_double(const std::string& field, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != field.size() || field.empty() || !std::isfinite(v)) {
    throw SchemaError(fmt::format("line {}: '{}' is not a finite number", line, field));
  }
  return v;
}

// Box-Muller from the engine's raw output keeps the draw independent of the
// standard library's distribution implementations.
double gaussian(std::mt19937_64& engine) {
  const auto uniform = [&] { return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53; };
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

json character_json(const DeviceCharacter& ch) {
  json j;
  j["center_shift"] = ch.center_shift;
  j["strength_product"] = ch.strength_product;
  j["shear_term"] = ch.shear_term;
  j["squeeze_term"] = ch.squeeze_term;
  j["shear_ratio"] = ch.shear_ratio;
  j["identifiability"] = ch.identifiability == Identifiability::Full ? "full" : "combos_only";
  const auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("probe_sharpness", ch.probe_sharpness);
  put("probe_bias", ch.probe_bias);
  put("squeeze", ch.squeeze);
  put("shear", ch.shear);
  put("target_strength", ch.target_strength);
  put("target_bias", ch.target_bias);
  if (ch.identifiability == Identifiability::Full) j["consistency"] = ch.consistency;
  j["residual_rms"] = ch.residual_rms;
  return j;
}

}  // namespace

std::vector<ScanRow> scan_rows(const Config& cfg) {
  const auto& thetas = cfg.target.thetas;
  std::vector<ScanRow> rows(thetas.size());
  parallel_for(thetas.size(), [&](std::size_t k) {
    const ConvexPovmSpec spec{thetas[k], cfg.target.gamma, cfg.target.bias};
    const QubitMeasurement target = spec.to_measurement();
    const DensityMatrix rho = cfg.state ? DensityMatrix::from_bloch(*cfg.state)
                                        : optimal_state(cfg.probe, target);
    rows[k] = qubit_row(cfg, k, thetas[k], rho, cfg.probe, to_povm(spec));
  });
  return rows;
}

std::vector<ScanRow> search_rows(const Config& cfg) {
  const auto& sp = cfg.search;
  const QubitMeasurement probe =
      ConvexPovmSpec{sp.probe_theta, sp.probe_gamma, sp.probe_bias}.to_measurement();
  const Povm target = to_povm(ConvexPovmSpec{sp.target_theta, sp.target_gamma, 0.0});
  std::vector<ScanRow> rows(sp.count);
  parallel_for(sp.count, [&](std::size_t k) {
    const double phi = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(sp.count);
    const auto rho = DensityMatrix::from_bloch(Vec3(std::sin(phi), 0.0, std::cos(phi)));
    rows[k] = qubit_row(cfg, k, phi, rho, probe, target);
  });
  return rows;
}

std::vector<ScanRow> highdim_rows(const Config& cfg) {
  const auto& hp = cfg.highdim;
  const auto d = static_cast<Eigen::Index>(hp.dim);
  std::mt19937_64 engine(cfg.seed);
  ComplexVector perp = ComplexVector::Zero(d);
  while (perp.norm() < 1e-6) {
    for (Eigen::Index i = 1; i < d; ++i) {
      const double re = gaussian(engine);
      const double im = gaussian(engine);
      perp[i] = Complex(re, im);
    }
  }
  perp.normalize();
  const ComplexVector e0 = ComplexVector::Unit(d, 0);
  const RandomizedDichotomic probe(e0, 1.0);
  const LuedersInstrument inst(probe.to_povm());

  std::vector<ScanRow> rows(hp.count);
  parallel_for(hp.count, [&](std::size_t k) {
    const double t = hp.count == 1 ? 0.0
                                   : 0.5 * M_PI * static_cast<double>(k) /
                                         static_cast<double>(hp.count - 1);
    const RandomizedDichotomic target(std::cos(t) * e0 + std::sin(t) * perp, hp.target_gamma);
    const auto rho = DensityMatrix::from_pure(overlap(probe, target).psi_plus);
    const Povm povm_b = target.to_povm();
    rows[k] = cfg.shots ? shot_row(t, experiment_model(rho, inst, povm_b), *cfg.shots,
                                   stream_seed(cfg.seed, k))
                        : exact_row(t, cd_from_scenario(rho, inst, povm_b));
  });
  return rows;
}

std::string format_csv(const std::string& first_column, const std::vector<ScanRow>& rows) {
  std::string out = first_column + "," + kScanColumns + "\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", num(r.x), num(r.c), num(r.d), num(r.c_err),
                       num(r.d_err), num(r.c * r.c + r.d * r.d));
  }
  return out;
}

CdScan parse_scan_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("scan file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != std::string("theta,") + kScanColumns) {
    throw SchemaError("scan header must be 'theta," + std::string(kScanColumns) + "'");
  }
  CdScan scan;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 6) throw SchemaError(fmt::format("line {}: expected 6 fields", lineno));
    CdPoint p;
    if (!fields[0].empty()) p.theta = parse_double(fields[0], lineno);  // empty: setting unknown
    p.c = parse_double(fields[1], lineno);
    p.d = parse_double(fields[2], lineno);
    p.c_err = parse_double(fields[3], lineno);
    p.d_err = parse_double(fields[4], lineno);
    if (p.c_err < 0.0 || p.d_err < 0.0) {
      throw SchemaError(fmt::format("line {}: negative error", lineno));
    }
    scan.points.push_back(p);
  }
  return scan;
}

CdScan read_scan_csv(const std::filesystem::path& path) { return parse_scan_csv(slurp(path)); }

CommandOutput cmd_scan(const Config& cfg) {
  const auto rows = scan_rows(cfg);
  return {format_csv("theta", rows), sidecar(cfg, "theta", rows.size())};
}

CommandOutput cmd_search_optimal(const Config& cfg) {
  const auto rows = search_rows(cfg);
  return {format_csv("phi", rows), sidecar(cfg, "phi", rows.size())};
}

CommandOutput cmd_highdim(const Config& cfg) {
  const auto rows = highdim_rows(cfg);
  return {format_csv("theta", rows), sidecar(cfg, "theta", rows.size())};
}

CommandOutput cmd_calibrate(const Config& cfg) {
  const auto& cp = cfg.calibrate;
  const std::string scan_text = slurp(cp.scan);
  CdScan scan = parse_scan_csv(scan_text);

  json report = report_header(cfg);
  report["method"] = cp.method == FitMethod::Circle       ? "circle"
                     : cp.method == FitMethod::KnownTheta ? "known-theta"
                                                          : "unknown-theta";
  report["points"] = scan.points.size();
  report["scan_sha256"] = sha256_hex(scan_text);

  FitOptions options;
  options.target_strength = cp.target_strength;
  if (cp.reference_scan) {
    const auto ref = fit_circle_sharp_probe(read_scan_csv(*cp.reference_scan));
    options.target_strength = ref.strength;
    report["reference"] = {{"strength", ref.strength},
                           {"strength_err", ref.strength_err},
                           {"residual_rms", ref.residual_rms}};
  }

  std::vector<std::string> names;
  switch (cp.method) {
    case FitMethod::Circle: {
      const auto fit = fit_circle_sharp_probe(scan);
      report["result"] = {{"strength", fit.strength},
                          {"strength_err", fit.strength_err},
                          {"residual_rms", fit.residual_rms}};
      names = {"strength"};
      break;
    }
    case FitMethod::KnownTheta:
      report["result"] = character_json(fit_ellipse_known_theta(scan, options));
      names = {"center_shift", "strength_product", "shear_term", "squeeze_term", "shear_ratio"};
      break;
    case FitMethod::UnknownTheta: {
      if (options.target_strength) {
        throw ConfigError("unknown-theta fits identify only the combinations; drop target_strength");
      }
      for (auto& p : scan.points) p.theta.reset();
      const auto ch = fit_ellipse_unknown_theta(scan);
      report["result"] = character_json(ch);
      report["result"]["center_offset_d"] = ch.center_offset_d;
      names = {"center_shift", "strength_product", "shear_term", "squeeze_term", "shear_ratio"};
      break;
    }
  }

  if (cp.bootstrap > 0) {
    const auto boot = bootstrap(scan, cp.method, options, cp.bootstrap, cfg.seed);
    json sd = json::object();
    for (std::size_t i = 0; i < boot.stddev.size() && i < names.size(); ++i) {
      sd[names[i]] = boot.stddev[i];
    }
    report["bootstrap"] = {{"resamples", cp.bootstrap},
                           {"used", boot.used},
                           {"failed", boot.failed},
                           {"stddev", sd}};
  }
  return {report.dump(2) + "\n", std::nullopt};
}

CommandOutput cmd_detector(const Config& cfg) {
  const auto& dp = cfg.detector;
  json report = report_header(cfg);
  double d1 = 0.0, c2 = 0.0, d1_err = dp.d1_err, c2_err = dp.c2_err;
  if (dp.eta) {
    const DetectorNoise truth{*dp.eta, *dp.nu};
    if (!cfg.shots) {
      d1 = scenario_cd(truth, DetectorReference::Sharp).disturbance;
      c2 = scenario_cd(truth, DetectorReference::FullyBiased).correlation;
      d1_err = c2_err = 0.0;
    } else {
      const auto measure = [&](DetectorReference ref, std::uint64_t index) {
        const auto sc = detector_scenario(truth, ref);
        return estimate_cd(sample(experiment_model(sc.state, sc.probe, sc.target), *cfg.shots,
                                  *cfg.shots, stream_seed(cfg.seed, index)));
      };
      const auto sharp = measure(DetectorReference::Sharp, 0);
      const auto biased = measure(DetectorReference::FullyBiased, 1);
      d1 = sharp.d_hat;
      d1_err = sharp.d_err;
      c2 = biased.c_hat;
      c2_err = biased.c_err;
    }
    report["truth"] = {{"eta", truth.eta}, {"nu", truth.nu}};
  } else {
    d1 = *dp.d1;
    c2 = *dp.c2;
  }
  report["measured"] = {{"d1", d1}, {"c2", c2}, {"d1_err", d1_err}, {"c2_err", c2_err}};
  const auto est = estimate_detector(d1, c2, d1_err, c2_err);
  report["estimate"] = {{"eta", est.noise.eta},
                        {"nu", est.noise.nu},
                        {"eta_err", est.eta_err},
                        {"nu_err", est.nu_err}};
  return {report.dump(2) + "\n", std::nullopt};
}

CommandOutput run(const Config& cfg) {
  switch (cfg.mode) {
    case Mode::Scan: return cmd_scan(cfg);
    case Mode::Calibrate: return cmd_calibrate(cfg);
    case Mode::Detector: return cmd_detector(cfg);
    case Mode::SearchOptimal: return cmd_search_optimal(cfg);
    case Mode::Highdim: return cmd_highdim(cfg);
  }
  throw ConfigError("unknown mode");
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InsufficientPoints:
    case ErrorCode::RankDeficient:
    case ErrorCode::NotAnEllipse:
      return 4;
    default:
      return 3;
  }
}

}  // namespace cdtrade::cli
