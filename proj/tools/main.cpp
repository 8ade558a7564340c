#include "commands.hpp"
#include "config.hpp"

#include "cdtrade/error.hpp"
#include "cdtrade/version.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw cdtrade::cli::ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out) throw cdtrade::cli::ConfigError("write to '" + path + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation-disturbance simulator and calibrator"};
  app.set_version_flag("--version", std::string(cdtrade::kVersion));

  std::string config_path;
  std::string out_path;
  std::string mode;
  std::uint64_t seed = 0;
  bool exact = false;
  app.add_option("--config", config_path, "JSON scenario config")->required();
  app.add_option("--out", out_path, "output file; scans also write <out>.json");
  auto* mode_opt = app.add_option("--mode", mode, "override the config mode")
                       ->check(CLI::IsMember({"scan", "calibrate", "detector", "search-optimal",
                                              "highdim"}));
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  app.add_flag("--exact", exact, "exact probabilities instead of shots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  using namespace cdtrade;
  try {
    cli::Overrides ov;
    if (mode_opt->count()) ov.mode = mode;
    if (seed_opt->count()) ov.seed = seed;
    ov.exact = exact;
    const auto cfg = cli::load_config(config_path, ov);
    const auto output = cli::run(cfg);
    if (out_path.empty()) {
      std::cout << output.primary;
    } else {
      write_file(out_path, output.primary);
      if (output.sidecar) write_file(out_path + ".json", *output.sidecar);
    }
    return 0;
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cli::SchemaError& e) {
    std::cerr << "scan file error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return cli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
