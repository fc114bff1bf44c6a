#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pspi/report.hpp"

namespace pspi {

/// Config keys per construction (every key but "construction" is optional;
/// unknown keys are rejected). Endpoint pairs are [start, end].
///
///   overlap         pairs [[[p,q],[p,q]], ...], D, grid {L, M}
///   quantize        h, D, grid {L, M} (default: antinormal_half_width)
///   lattice_q       V, N_list, T, endpoints_q [q', q''], grid {L, M}
///   lattice_cs      h, N_list, T, endpoints [[p,q],[p,q]], grid {L, M}, D
///   wiener          h, nu_list, T, n_steps, n_paths, endpoints, D, seed
///   demo_fresnel    nu_list
///   demo_ambiguity  T, nu_list, endpoints, refine
///
/// Returns the normalized config with every default filled in; this is the
/// object the report echoes and hashes. Throws InvalidConfig.
nlohmann::json normalize_config(const nlohmann::json& config, std::optional<std::uint64_t> seed = std::nullopt);

/// Validates, runs and assembles the report. Nothing is written here; the
/// caller emits the tables once the run has succeeded.
ConvergenceReport run_experiment(const nlohmann::json& config, std::optional<std::uint64_t> seed = std::nullopt);

// "lattice-q" -> "lattice_q"
std::string construction_for_command(std::string_view command);

}  // namespace pspi
