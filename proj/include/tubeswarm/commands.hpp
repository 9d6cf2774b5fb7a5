#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tubeswarm/scenario.hpp"
#include "tubeswarm/simulator.hpp"

namespace tubeswarm {

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides sim.seed and planner.probe_seed
  std::optional<double> dt;           // overrides sim.dt
};

struct CommandResult {
  int exit_code = 0;
  nlohmann::json document;  // printed on stdout by the CLI
  std::vector<std::string> written;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitFailure = 3;

/// Plans and writes <name>.plan.json (profile plus constraint report).
CommandResult cmd_plan(const ScenarioConfig& scenario, const CommandOptions& options);

/// Writes <name>.<mode>.trace.csv and <name>.<mode>.summary.json. In
/// with-planning mode without a plan file, plans first and also writes
/// <name>.plan.json.
CommandResult cmd_simulate(const ScenarioConfig& scenario, Mode mode,
                           const std::optional<std::filesystem::path>& plan_path, const CommandOptions& options);

/// Runs both modes concurrently; writes both traces and summaries plus
/// <name>.compare.json with the headline rows {mode, passing_time, min_distance}.
CommandResult cmd_compare(const ScenarioConfig& scenario, const CommandOptions& options);

/// Audits a plan file against the scenario; exit code 0 iff feasible.
CommandResult cmd_validate(const std::filesystem::path& plan_path, const ScenarioConfig& scenario,
                           const CommandOptions& options);

/// {"ok": false, "error": {"type", "message", "issues"?}} and the matching exit code.
CommandResult error_result(const std::exception& error);

/// Canonical text form of every JSON artifact.
std::string dump_document(const nlohmann::json& doc);

/// Writes through a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace tubeswarm
