// tubeswarm: plan, simulate, compare and validate swarm passages through
// virtual tubes. Results go to stdout as JSON; failures as error JSON on
// stderr with a nonzero exit code.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tubeswarm/commands.hpp"

namespace {

int emit(const tubeswarm::CommandResult& result) {
  auto& stream = result.document.contains("error") ? std::cerr : std::cout;
  stream << result.document.dump() << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swarm passage through virtual tubes with density-aware planning", "tubeswarm"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  app.add_option("--out", out_dir, "Output directory (TUBESWARM_OUT overrides)");
  app.add_option("--seed", seed, "Seed for the formation jitter and the planner's perturbation probe");
  app.add_option("--dt", dt, "Simulation time step in seconds");

  std::string scenario_arg;
  std::string plan_file;
  std::string mode_arg;

  auto* plan_cmd = app.add_subcommand("plan", "Plan speed and density profiles");
  plan_cmd->add_option("scenario", scenario_arg, "Built-in name or scenario JSON file")->required();

  auto* sim_cmd = app.add_subcommand("simulate", "Simulate one mode and write its trace");
  sim_cmd->add_option("scenario", scenario_arg, "Built-in name or scenario JSON file")->required();
  sim_cmd->add_option("--mode", mode_arg, "with | without")->required()->check(CLI::IsMember({"with", "without"}));
  sim_cmd->add_option("--plan", plan_file, "Plan JSON; planned on the fly when omitted");

  auto* cmp_cmd = app.add_subcommand("compare", "Simulate both modes side by side");
  cmp_cmd->add_option("scenario", scenario_arg, "Built-in name or scenario JSON file")->required();

  auto* val_cmd = app.add_subcommand("validate", "Check a plan against every constraint");
  val_cmd->add_option("plan", plan_file, "Plan JSON")->required();
  val_cmd->add_option("scenario", scenario_arg, "Built-in name or scenario JSON file")->required();

  for (auto* sub : {plan_cmd, sim_cmd, cmp_cmd, val_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const nlohmann::json err = {{"ok", false}, {"error", {{"type", "usage_error"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return tubeswarm::kExitBadInput;
  }

  tubeswarm::CommandOptions options;
  options.out_dir = out_dir;
  if (const char* env = std::getenv("TUBESWARM_OUT"); env != nullptr && *env != '\0') options.out_dir = env;
  options.seed = seed;
  options.dt = dt;

  try {
    const auto scenario = tubeswarm::load_scenario(scenario_arg);
    if (*plan_cmd) return emit(tubeswarm::cmd_plan(scenario, options));
    if (*sim_cmd) {
      std::optional<std::filesystem::path> plan_path;
      if (!plan_file.empty()) plan_path = plan_file;
      return emit(tubeswarm::cmd_simulate(scenario, tubeswarm::mode_from_string(mode_arg), plan_path, options));
    }
    if (*cmp_cmd) return emit(tubeswarm::cmd_compare(scenario, options));
    return emit(tubeswarm::cmd_validate(plan_file, scenario, options));
  } catch (const std::exception& e) {
    return emit(tubeswarm::error_result(e));
  }
}
