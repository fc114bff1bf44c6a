#include "pspi/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pspi/error.hpp"

namespace pspi {
namespace {

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::ReportMismatch, "not a number in report: '" + s + "'");
  }
  if (used != s.size()) fail(ErrorKind::ReportMismatch, "trailing characters in report field '" + s + "'");
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  out.close();
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace

void ConvergenceReport::add_row(double param, cplx estimate, cplx oracle, double std_error) {
  rows.push_back({param, estimate, oracle, std::abs(estimate - oracle), std_error});
}

void ConvergenceReport::add_certificate(std::string name, double value, bool pass) {
  certificates.push_back({std::move(name), value, pass});
}

bool ConvergenceReport::all_certificates_pass() const {
  return std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.pass; });
}

std::string config_digest(const nlohmann::json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_csv(const ConvergenceReport& report) {
  std::vector<ReportRow> rows = report.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) { return a.param < b.param; });
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    for (const double v : {r.param, r.estimate.real(), r.estimate.imag(), r.oracle.real(), r.oracle.imag()}) {
      out += format17(v);
      out += ',';
    }
    out += format17(r.abs_error);
    out += ',';
    out += format17(r.std_error);
    out += '\n';
  }
  return out;
}

nlohmann::json sidecar(const ConvergenceReport& report) {
  nlohmann::json certs = nlohmann::json::array();
  for (const auto& c : report.certificates) certs.push_back({{"name", c.name}, {"value", c.value}, {"pass", c.pass}});
  return {
      {"construction", report.construction},
      {"parameter_name", report.parameter_name},
      {"config", report.config},
      {"config_digest", report.config_digest},
      {"seed", report.seed},
      {"certificates", certs},
      {"fitted_order", report.fitted_order ? nlohmann::json(*report.fitted_order) : nlohmann::json(nullptr)},
      {"tool_version", kToolVersion},
      {"extras", report.extras},
  };
}

void emit_tables(const ConvergenceReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
  write_file(dir / (report.construction + ".csv"), to_csv(report));
  write_file(dir / (report.construction + ".json"), sidecar(report).dump(2) + "\n");
}

ConvergenceReport load_report(const std::filesystem::path& csv_path, const std::filesystem::path& json_path) {
  ConvergenceReport report;
  nlohmann::json side;
  try {
    side = nlohmann::json::parse(read_file(json_path));
    report.construction = side.at("construction").get<std::string>();
    report.parameter_name = side.at("parameter_name").get<std::string>();
    report.config = side.at("config");
    report.config_digest = side.at("config_digest").get<std::string>();
    report.seed = side.at("seed").get<std::uint64_t>();
    if (!side.at("fitted_order").is_null()) report.fitted_order = side.at("fitted_order").get<double>();
    for (const auto& c : side.at("certificates"))
      report.add_certificate(c.at("name").get<std::string>(), c.at("value").get<double>(), c.at("pass").get<bool>());
    report.extras = side.value("extras", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ReportMismatch, std::string("malformed sidecar: ") + e.what());
  }
  if (config_digest(report.config) != report.config_digest)
    fail(ErrorKind::ReportMismatch, "sidecar config does not match its digest");

  std::istringstream in(read_file(csv_path));
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) fail(ErrorKind::ReportMismatch, "unexpected CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 7) fail(ErrorKind::ReportMismatch, "CSV row does not have 7 fields: " + line);
    ReportRow r;
    r.param = parse_double(f[0]);
    r.estimate = {parse_double(f[1]), parse_double(f[2])};
    r.oracle = {parse_double(f[3]), parse_double(f[4])};
    r.abs_error = parse_double(f[5]);
    r.std_error = parse_double(f[6]);
    if (std::abs(r.estimate - r.oracle) != r.abs_error)
      fail(ErrorKind::ReportMismatch, "abs_error does not match |estimate - oracle| at param " + f[0]);
    if (!report.rows.empty() && r.param < report.rows.back().param)
      fail(ErrorKind::ReportMismatch, "CSV rows are not sorted by param");
    report.rows.push_back(r);
  }
  return report;
}

}  // namespace pspi
