#pragma once

#include "config.hpp"

#include "cdtrade/calibration.hpp"
#include "cdtrade/error.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cdtrade::cli {

/// Malformed scan file (exit code 2).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScanRow {
  double x = 0.0;  // theta, phi or t depending on the mode
  double c = 0.0;
  double d = 0.0;
  double c_err = 0.0;
  double d_err = 0.0;
};

/// What a command produces: the primary document (CSV or JSON report) and,
/// for scans, a JSON sidecar describing it.
struct CommandOutput {
  std::string primary;
  std::optional<std::string> sidecar;
};

std::vector<ScanRow> scan_rows(const Config& cfg);
std::vector<ScanRow> search_rows(const Config& cfg);
std::vector<ScanRow> highdim_rows(const Config& cfg);

std::string format_csv(const std::string& first_column, const std::vector<ScanRow>& rows);
CdScan parse_scan_csv(const std::string& text);
CdScan read_scan_csv(const std::filesystem::path& path);

CommandOutput cmd_scan(const Config& cfg);
CommandOutput cmd_search_optimal(const Config& cfg);
CommandOutput cmd_highdim(const Config& cfg);
CommandOutput cmd_calibrate(const Config& cfg);
CommandOutput cmd_detector(const Config& cfg);

CommandOutput run(const Config& cfg);

/// 0 success, 2 config, 3 physics or feasibility, 4 fit failure.
int exit_code_for(ErrorCode code);

}  // namespace cdtrade::cli
