#include "config.hpp"

#include "cdtrade/error.hpp"

#include <openssl/evp.h>

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <set>

namespace cdtrade::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

void reject_degrees(const json& node, const std::string& where) {
  if (node.is_array()) {
    for (const auto& item : node) reject_degrees(item, where);
    return;
  }
  if (!node.is_object()) return;
  for (const auto& [key, value] : node.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    const bool degree_key = key.size() > 4 && key.compare(key.size() - 4, 4, "_deg") == 0;
    if (degree_key || key == "degrees") fail("degree-valued key '" + path + "'; angles are radians");
    if (key == "angle_unit" && value != "rad") fail("'" + path + "' must be \"rad\"");
    reject_degrees(value, path);
  }
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail("'" + where + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) fail("unknown key '" + where + "." + key + "'");
  }
}

double number(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail("'" + where + "." + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail("'" + where + "." + key + "' must be finite");
  return x;
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  return number(obj, key, where, 0.0);
}

// nlohmann stores literals built in C++ as signed, parsed text as unsigned.
bool non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::uint64_t count(const json& obj, const char* key, const std::string& where,
                    std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!non_negative_integer(v)) fail("'" + where + "." + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

Vec3 vec3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail("'" + where + "' must be a 3-vector");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) fail("'" + where + "' entries must be numbers");
    out[i] = v[static_cast<std::size_t>(i)].get<double>();
  }
  if (!out.allFinite()) fail("'" + where + "' must be finite");
  return out;
}

QubitMeasurement parse_probe(const json& p) {
  only_keys(p, "probe", {"bias", "bloch", "theta", "gamma", "angle_unit"});
  const double bias = number(p, "bias", "probe", 0.0);
  QubitMeasurement m;
  if (p.contains("bloch")) {
    if (p.contains("theta") || p.contains("gamma")) fail("probe takes either bloch or theta/gamma");
    m = {bias, vec3(p.at("bloch"), "probe.bloch")};
  } else {
    ConvexPovmSpec spec{number(p, "theta", "probe", 0.0), number(p, "gamma", "probe", 1.0), bias};
    m = spec.to_measurement();
  }
  m.validate();
  return m;
}

TargetSpec parse_target(const json& t) {
  only_keys(t, "target", {"bias", "gamma", "theta", "thetas", "theta_grid", "angle_unit"});
  TargetSpec out;
  out.gamma = number(t, "gamma", "target", 1.0);
  out.bias = number(t, "bias", "target", 0.0);
  const int given = int(t.contains("theta")) + int(t.contains("thetas")) + int(t.contains("theta_grid"));
  if (given > 1) fail("target takes one of theta, thetas, theta_grid");
  if (t.contains("theta")) {
    out.thetas = {number(t, "theta", "target", 0.0)};
  } else if (t.contains("thetas")) {
    const auto& arr = t.at("thetas");
    if (!arr.is_array() || arr.empty()) fail("'target.thetas' must be a non-empty array");
    for (const auto& v : arr) {
      if (!v.is_number()) fail("'target.thetas' entries must be numbers");
      out.thetas.push_back(v.get<double>());
    }
  } else if (t.contains("theta_grid")) {
    const auto& g = t.at("theta_grid");
    only_keys(g, "target.theta_grid", {"start", "stop", "count"});
    const double start = number(g, "start", "target.theta_grid", 0.0);
    const double stop = number(g, "stop", "target.theta_grid", M_PI);
    const auto n = count(g, "count", "target.theta_grid", 32);
    if (n == 0) fail("'target.theta_grid.count' must be positive");
    for (std::uint64_t k = 0; k < n; ++k) {
      out.thetas.push_back(n == 1 ? start : start + (stop - start) * double(k) / double(n - 1));
    }
  } else {
    out.thetas = {0.0};
  }
  for (double th : out.thetas) {
    if (!std::isfinite(th)) fail("target angles must be finite");
  }
  ConvexPovmSpec{0.0, out.gamma, out.bias}.validate();
  return out;
}

std::filesystem::path resolve(const json& v, const std::string& where,
                              const std::filesystem::path& base) {
  if (!v.is_string()) fail("'" + where + "' must be a path string");
  std::filesystem::path p(v.get<std::string>());
  return p.is_absolute() ? p : base / p;
}

}  // namespace

Mode parse_mode(const std::string& name) {
  if (name == "scan") return Mode::Scan;
  if (name == "calibrate") return Mode::Calibrate;
  if (name == "detector") return Mode::Detector;
  if (name == "search-optimal") return Mode::SearchOptimal;
  if (name == "highdim") return Mode::Highdim;
  fail("unknown mode '" + name + "'");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Scan: return "scan";
    case Mode::Calibrate: return "calibrate";
    case Mode::Detector: return "detector";
    case Mode::SearchOptimal: return "search-optimal";
    case Mode::Highdim: return "highdim";
  }
  return "scan";
}

Config parse_config(json doc, const Overrides& overrides, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) fail("config must be a JSON object");
  reject_degrees(doc, "");
  only_keys(doc, "", {"schema", "mode", "seed", "shots", "policy", "probe", "target", "state",
                      "search", "highdim", "detector", "calibrate", "angle_unit"});
  if (!doc.contains("schema") || doc.at("schema") != kConfigSchema) {
    fail(fmt::format("'schema' must be \"{}\"", kConfigSchema));
  }

  if (overrides.mode) doc["mode"] = *overrides.mode;
  if (overrides.seed) doc["seed"] = *overrides.seed;
  if (overrides.exact) doc["shots"] = "exact";

  Config cfg;
  if (!doc.contains("mode") || !doc.at("mode").is_string()) fail("'mode' must be a string");
  cfg.mode = parse_mode(doc.at("mode").get<std::string>());
  cfg.seed = count(doc, "seed", "", 0);

  if (doc.contains("shots")) {
    const auto& s = doc.at("shots");
    if (s.is_string() && s == "exact") {
      cfg.shots.reset();
    } else if (non_negative_integer(s) && s.get<std::uint64_t>() > 0) {
      cfg.shots = s.get<std::uint64_t>();
    } else {
      fail("'shots' must be a positive integer or \"exact\"");
    }
  }
  if (doc.contains("policy")) {
    if (!doc.at("policy").is_string()) fail("'policy' must be a string");
    try {
      cfg.policy = parse_policy(doc.at("policy").get<std::string>());
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  if (doc.contains("probe")) cfg.probe = parse_probe(doc.at("probe"));
  if (doc.contains("target")) cfg.target = parse_target(doc.at("target"));
  if (doc.contains("state")) {
    const auto& s = doc.at("state");
    if (s.is_string() && s == "optimal") {
      cfg.state.reset();
    } else {
      cfg.state = vec3(s, "state");
      if (cfg.state->norm() > 1.0 + tol::kPsd) {
        throw Error(ErrorCode::NotPsd, "state Bloch vector longer than 1");
      }
    }
  }

  if (doc.contains("search")) {
    const auto& s = doc.at("search");
    only_keys(s, "search", {"probe_theta", "probe_gamma", "probe_bias", "target_theta",
                            "target_gamma", "count", "angle_unit"});
    auto& sp = cfg.search;
    sp.probe_theta = number(s, "probe_theta", "search", sp.probe_theta);
    sp.probe_gamma = number(s, "probe_gamma", "search", sp.probe_gamma);
    sp.probe_bias = number(s, "probe_bias", "search", sp.probe_bias);
    sp.target_theta = number(s, "target_theta", "search", sp.target_theta);
    sp.target_gamma = number(s, "target_gamma", "search", sp.target_gamma);
    sp.count = count(s, "count", "search", sp.count);
    if (sp.count == 0) fail("'search.count' must be positive");
    ConvexPovmSpec{sp.probe_theta, sp.probe_gamma, sp.probe_bias}.validate();
    ConvexPovmSpec{sp.target_theta, sp.target_gamma, 0.0}.validate();
  }

  if (doc.contains("highdim")) {
    const auto& h = doc.at("highdim");
    only_keys(h, "highdim", {"dim", "target_gamma", "count"});
    auto& hp = cfg.highdim;
    hp.dim = static_cast<int>(count(h, "dim", "highdim", 3));
    hp.target_gamma = number(h, "target_gamma", "highdim", 1.0);
    hp.count = count(h, "count", "highdim", hp.count);
    if (hp.count == 0) fail("'highdim.count' must be positive");
    if (hp.dim < 2) throw Error(ErrorCode::InvalidDim, "highdim.dim must be at least 2");
    if (!(hp.target_gamma >= 0.0 && hp.target_gamma <= 1.0)) {
      throw Error(ErrorCode::InvalidMeasurement, "highdim.target_gamma outside [0,1]");
    }
  }

  if (doc.contains("detector")) {
    const auto& d = doc.at("detector");
    only_keys(d, "detector", {"eta", "nu", "d1", "c2", "d1_err", "c2_err"});
    auto& dp = cfg.detector;
    dp.eta = optional_number(d, "eta", "detector");
    dp.nu = optional_number(d, "nu", "detector");
    dp.d1 = optional_number(d, "d1", "detector");
    dp.c2 = optional_number(d, "c2", "detector");
    dp.d1_err = number(d, "d1_err", "detector", 0.0);
    dp.c2_err = number(d, "c2_err", "detector", 0.0);
    const bool simulate = dp.eta && dp.nu;
    const bool invert = dp.d1 && dp.c2;
    if (simulate == invert || bool(dp.eta) != bool(dp.nu) || bool(dp.d1) != bool(dp.c2)) {
      fail("'detector' takes either {eta, nu} or {d1, c2}");
    }
    if (simulate) DetectorNoise{*dp.eta, *dp.nu}.validate();
  }

  if (doc.contains("calibrate")) {
    const auto& c = doc.at("calibrate");
    only_keys(c, "calibrate", {"scan", "method", "target_strength", "reference_scan", "bootstrap"});
    auto& cp = cfg.calibrate;
    if (!c.contains("scan")) fail("'calibrate.scan' is required");
    cp.scan = resolve(c.at("scan"), "calibrate.scan", base_dir);
    const std::string method = c.value("method", std::string("circle"));
    if (method == "circle") {
      cp.method = FitMethod::Circle;
    } else if (method == "known-theta") {
      cp.method = FitMethod::KnownTheta;
    } else if (method == "unknown-theta") {
      cp.method = FitMethod::UnknownTheta;
    } else {
      fail("unknown calibration method '" + method + "'");
    }
    cp.target_strength = optional_number(c, "target_strength", "calibrate");
    if (c.contains("reference_scan")) {
      cp.reference_scan = resolve(c.at("reference_scan"), "calibrate.reference_scan", base_dir);
    }
    if (cp.target_strength && cp.reference_scan) {
      fail("give either calibrate.target_strength or calibrate.reference_scan");
    }
    cp.bootstrap = count(c, "bootstrap", "calibrate", 200);
  }

  const bool needs_block = (cfg.mode == Mode::Detector && !doc.contains("detector")) ||
                           (cfg.mode == Mode::Calibrate && !doc.contains("calibrate"));
  if (needs_block) fail("mode '" + to_string(cfg.mode) + "' needs its config block");

  cfg.raw = std::move(doc);
  return cfg;
}

Config load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) fail("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(std::move(doc), overrides, path.parent_path());
}

std::string config_hash(const json& effective) { return sha256_hex(effective.dump()); }

std::string sha256_hex(std::string_view text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace cdtrade::cli
