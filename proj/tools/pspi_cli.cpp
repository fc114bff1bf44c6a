#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pspi/error.hpp"
#include "pspi/experiments.hpp"
#include "pspi/parallel.hpp"
#include "pspi/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCertificate = 3;
constexpr int kExitIo = 4;

int exit_code_for(pspi::ErrorKind kind) {
  if (pspi::is_certificate_failure(kind)) return kExitCertificate;
  if (kind == pspi::ErrorKind::Io) return kExitIo;
  return kExitConfig;
}

void print_summary(const pspi::ConvergenceReport& r) {
  std::printf("%s: %zu rows, parameter %s, digest %s\n", r.construction.c_str(), r.rows.size(),
              r.parameter_name.c_str(), r.config_digest.c_str());
  for (const auto& row : r.rows)
    std::printf("  %s=%-10g estimate=(% .10e, % .10e) oracle=(% .10e, % .10e) err=%.3e se=%.3e\n",
                r.parameter_name.c_str(), row.param, row.estimate.real(), row.estimate.imag(), row.oracle.real(),
                row.oracle.imag(), row.abs_error, row.std_error);
  if (r.fitted_order) std::printf("  fitted order %.4f\n", *r.fitted_order);
  for (const auto& c : r.certificates)
    std::printf("  certificate %-30s %.4e %s\n", c.name.c_str(), c.value, c.pass ? "pass" : "FAIL");
  if (r.extras.contains("verdict")) std::printf("  verdict %s\n", r.extras["verdict"].get<std::string>().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-space path integral laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int workers = 0;

  const std::vector<std::string> commands = {"overlap",    "quantize",     "lattice-q",      "lattice-cs",
                                             "wiener",     "demo-fresnel", "demo-ambiguity"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory for <construction>.csv/.json");
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--workers", workers, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const std::string construction = pspi::construction_for_command(command);
  pspi::set_worker_count(workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency()));

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read config " << config_path << "\n";
      return kExitConfig;
    }
    nlohmann::json cfg;
    try {
      cfg = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
      return kExitConfig;
    }
    if (!cfg.is_object()) {
      std::cerr << "error: config must be a JSON object\n";
      return kExitConfig;
    }
    if (!cfg.contains("construction")) cfg["construction"] = construction;
    if (cfg["construction"] != construction) {
      std::cerr << "error: config construction " << cfg["construction"].dump() << " does not match subcommand "
                << command << "\n";
      return kExitConfig;
    }

    const pspi::ConvergenceReport report = pspi::run_experiment(cfg, seed);
    pspi::emit_tables(report, out_dir);
    print_summary(report);
    return report.all_certificates_pass() ? kExitOk : kExitCertificate;
  } catch (const pspi::Error& e) {
    std::cerr << "error (" << pspi::to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
