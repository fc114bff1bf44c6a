#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pspi/fock.hpp"

namespace pspi {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kCsvHeader = "param,estimate_re,estimate_im,oracle_re,oracle_im,abs_error,std_error";

struct ReportRow {
  double param = 0.0;
  cplx estimate;
  cplx oracle;
  double abs_error = 0.0;
  double std_error = 0.0;
};

struct Certificate {
  std::string name;
  double value = 0.0;
  bool pass = true;
};

struct ConvergenceReport {
  std::string construction;
  std::string parameter_name;
  std::vector<ReportRow> rows;
  std::optional<double> fitted_order;
  nlohmann::json config;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::vector<Certificate> certificates;
  nlohmann::json extras = nlohmann::json::object();

  // Appends a row with abs_error = |estimate - oracle|.
  void add_row(double param, cplx estimate, cplx oracle, double std_error = 0.0);
  void add_certificate(std::string name, double value, bool pass);
  bool all_certificates_pass() const;
};

// 64-bit FNV-1a of the canonical (sorted-key, compact) JSON dump, as 16 hex digits.
std::string config_digest(const nlohmann::json& config);

// Rows sorted by param, every double as %.17g.
std::string to_csv(const ConvergenceReport& report);
nlohmann::json sidecar(const ConvergenceReport& report);

// Writes <dir>/<construction>.csv and <dir>/<construction>.json, replacing
// existing files. Throws Io on failure.
void emit_tables(const ConvergenceReport& report, const std::filesystem::path& dir);

/// Reads a CSV and its sidecar back. abs_error is recomputed from the
/// estimate and oracle columns; any difference from the stored value, a bad
/// header or a digest that does not match the stored config throws
/// ReportMismatch.
ConvergenceReport load_report(const std::filesystem::path& csv_path, const std::filesystem::path& json_path);

}  // namespace pspi
