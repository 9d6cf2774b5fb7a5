#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "tubeswarm/commands.hpp"
#include "tubeswarm/errors.hpp"

using namespace tubeswarm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tubeswarm_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Invocation {
  int exit_code;
  std::string out;
  std::string err;
};

Invocation cli(const std::string& args, const fs::path& dir, const std::string& env = "") {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string command = env + " '" TUBESWARM_CLI_PATH "' " + args + " >'" + out.string() + "' 2>'" +
                              err.string() + "'";
  const int status = std::system(command.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

bool has_temporaries(const fs::path& dir) {
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename().string().find(".tmp.") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate accepts the analytic constant plan") {
    const fs::path dir = scratch("validate");
    const ScenarioConfig s = load_scenario("straight");
    const PlanProfile constant = PlanProfile::constant(50.0, s.params.v_max, s.params.rho_d);
    write_atomic(dir / "constant.json", dump_document(to_json(constant)));
    const CommandResult ok = cmd_validate(dir / "constant.json", s, {dir});
    CHECK(ok.exit_code == kExitOk);
    CHECK(ok.document["feasible"] == true);

    const PlanProfile too_fast = PlanProfile::constant(50.0, 1.1 * s.params.v_max, s.params.rho_d);
    write_atomic(dir / "too_fast.json", dump_document(to_json(too_fast)));
    const CommandResult bad = cmd_validate(dir / "too_fast.json", s, {dir});
    CHECK(bad.exit_code == kExitInfeasible);
    CHECK(bad.document["feasible"] == false);
  }

  TEST_CASE("plan writes its artifact atomically") {
    const fs::path dir = scratch("plan");
    const CommandResult r = cmd_plan(load_scenario("straight"), {dir});
    CHECK(r.exit_code == kExitOk);
    CHECK(r.document["status"] == "optimal");
    REQUIRE(fs::exists(dir / "straight.plan.json"));
    const json plan = json::parse(slurp(dir / "straight.plan.json"));
    CHECK(plan["constraint_report"]["feasible"] == true);
    CHECK(plan["scenario"] == "straight");
    CHECK_FALSE(has_temporaries(dir));

    const CommandResult v = cmd_validate(dir / "straight.plan.json", load_scenario("straight"), {dir});
    CHECK(v.exit_code == kExitOk);
  }

  TEST_CASE("simulate with planning plans first when no plan is given") {
    const fs::path dir = scratch("simulate");
    const CommandResult r = cmd_simulate(load_scenario("straight"), Mode::kWithPlanning, std::nullopt, {dir});
    CHECK(r.exit_code == kExitOk);
    CHECK(fs::exists(dir / "straight.plan.json"));
    CHECK(fs::exists(dir / "straight.with.trace.csv"));
    const json summary = json::parse(slurp(dir / "straight.with.summary.json"));
    CHECK(summary["mode"] == "with_planning");
    CHECK(summary["plan"]["source"] == "straight.plan.json");
    CHECK(summary["metrics"]["completed"] == true);

    const CommandResult again =
        cmd_simulate(load_scenario("straight"), Mode::kWithPlanning, dir / "straight.plan.json", {dir / "again"});
    CHECK(again.exit_code == kExitOk);
    CHECK_FALSE(fs::exists(dir / "again" / "straight.plan.json"));
    const json replay = json::parse(slurp(dir / "again" / "straight.with.summary.json"));
    CHECK(replay["metrics"] == summary["metrics"]);
  }

  TEST_CASE("error documents") {
    const CommandResult config = error_result(ConfigError("$.params.v_min", "must be positive"));
    CHECK(config.exit_code == kExitBadInput);
    CHECK(config.document["ok"] == false);
    CHECK(config.document["error"]["type"] == "config_error");
    CHECK(config.document["error"]["issues"][0]["path"] == "$.params.v_min");
    CHECK(error_result(DomainError("l out of range")).exit_code == kExitBadInput);
    CHECK(error_result(std::invalid_argument("bad")).exit_code == kExitBadInput);
    CHECK(error_result(std::runtime_error("disk full")).exit_code == kExitFailure);
    CHECK(error_result(std::runtime_error("disk full")).document["error"]["type"] == "runtime_error");
  }

  TEST_CASE("command line: outputs and the output directory override") {
    const fs::path dir = scratch("binary");
    const auto r = cli("plan straight --out '" + (dir / "flag").string() + "'", dir,
                       "TUBESWARM_OUT='" + (dir / "env").string() + "'");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "env" / "straight.plan.json"));
    CHECK_FALSE(fs::exists(dir / "flag"));
    const json doc = json::parse(r.out);
    CHECK(doc["ok"] == true);
    CHECK(doc["written"][0] == "straight.plan.json");

    const auto v = cli("validate '" + (dir / "env" / "straight.plan.json").string() + "' straight", dir);
    CHECK(v.exit_code == 0);
  }

  TEST_CASE("command line: failures exit nonzero with error json") {
    const fs::path dir = scratch("binary_errors");
    const auto unknown = cli("plan nowhere --out '" + dir.string() + "'", dir);
    CHECK(unknown.exit_code == kExitBadInput);
    CHECK(unknown.out.empty());
    const json err = json::parse(unknown.err);
    CHECK(err["ok"] == false);
    CHECK(err["error"]["type"] == "config_error");

    const auto usage = cli("simulate caseA --mode sideways", dir);
    CHECK(usage.exit_code == kExitBadInput);
    CHECK(json::parse(usage.err)["error"]["type"] == "usage_error");

    const auto dt = cli("simulate straight --mode without --dt -1 --out '" + dir.string() + "'", dir);
    CHECK(dt.exit_code == kExitBadInput);

    std::ofstream(dir / "garbage.json") << "[1, 2";
    const auto plan = cli("validate '" + (dir / "garbage.json").string() + "' straight", dir);
    CHECK(plan.exit_code == kExitBadInput);
  }
}
