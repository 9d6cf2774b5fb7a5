#include "tubeswarm/commands.hpp"

#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "tubeswarm/errors.hpp"
#include "tubeswarm/planner.hpp"

namespace tubeswarm {

using nlohmann::json;
namespace fs = std::filesystem;

std::string dump_document(const json& doc) { return doc.dump(2) + "\n"; }

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  fs::rename(tmp, path);
}

CommandResult error_result(const std::exception& error) {
  json err = {{"message", error.what()}};
  int code = kExitFailure;
  if (const auto* config = dynamic_cast<const ConfigError*>(&error)) {
    err["type"] = "config_error";
    json issues = json::array();
    for (const auto& i : config->issues()) issues.push_back({{"path", i.path}, {"message", i.message}});
    err["issues"] = issues;
    code = kExitBadInput;
  } else if (dynamic_cast<const DomainError*>(&error) != nullptr) {
    err["type"] = "domain_error";
    code = kExitBadInput;
  } else if (dynamic_cast<const std::invalid_argument*>(&error) != nullptr) {
    err["type"] = "invalid_argument";
    code = kExitBadInput;
  } else {
    err["type"] = "runtime_error";
  }
  return {code, {{"ok", false}, {"error", err}}, {}};
}

namespace {

struct Prepared {
  ScenarioConfig scenario;
  VirtualTube tube;
  PlannerConfig planner;
};

Prepared prepare(const ScenarioConfig& scenario, const CommandOptions& options) {
  ScenarioConfig s = scenario;
  if (options.seed) {
    s.sim.seed = *options.seed;
    s.planner.probe_seed = *options.seed;
  }
  if (options.dt) {
    if (!(*options.dt > 0.0)) throw std::invalid_argument("--dt must be positive");
    s.sim.dt = *options.dt;
  }
  VirtualTube tube = s.build_tube();
  PlannerConfig planner = s.resolved_planner(tube);
  return {std::move(s), std::move(tube), std::move(planner)};
}

std::string artifact(const Prepared& p, const std::string& suffix) { return p.scenario.name + suffix; }

json plan_document(const Prepared& p, const PlanResult& result) {
  json doc = to_json(result);
  doc["scenario"] = p.scenario.name;
  doc["planner"] = to_json(p.planner);
  return doc;
}

PlanProfile read_plan(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("$", "cannot open plan file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("$", "plan file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return plan_profile_from_json(doc);
}

struct PlanSource {
  std::optional<PlanProfile> profile;
  json info;
};

// Plan from a file, or a fresh plan written next to the other artifacts.
PlanSource obtain_plan(const Prepared& p, const std::optional<fs::path>& plan_path, const CommandOptions& options,
                       std::vector<std::string>& written) {
  if (plan_path) return {read_plan(*plan_path), {{"source", plan_path->filename().string()}}};
  PlanResult result = plan(p.tube, p.scenario.params, p.planner);
  if (result.status == PlanStatus::kInfeasible) {
    std::string why = "planning failed";
    for (const auto& d : result.diagnostics) why += "; " + d;
    throw std::runtime_error(why);
  }
  const std::string name = artifact(p, ".plan.json");
  write_atomic(options.out_dir / name, dump_document(plan_document(p, result)));
  written.push_back(name);
  return {std::move(result.profile),
          {{"source", name}, {"status", to_string(result.status)}, {"objective", result.objective}}};
}

std::string mode_tag(Mode mode) { return mode == Mode::kWithPlanning ? "with" : "without"; }

TraceReport simulate(const Prepared& p, Mode mode, const std::optional<PlanProfile>& profile) {
  const SwarmParams& params = p.scenario.params;
  const Guidance guidance =
      mode == Mode::kWithPlanning ? Guidance::planned(*profile) : Guidance::baseline(0.5 * (params.v_min + params.v_max));
  auto robots = initial_formation(p.tube, params, guidance, p.scenario.sim.seed, p.scenario.sim.formation_jitter);
  return run(p.tube, params, guidance, mode, p.scenario.sim, std::move(robots));
}

json summary_document(const Prepared& p, const TraceReport& trace, const json& plan_info) {
  json doc = {{"format", "tubeswarm.summary/1"},
              {"scenario", p.scenario.name},
              {"mode", to_string(trace.mode)},
              {"dt", trace.dt},
              {"seed", p.scenario.sim.seed},
              {"metrics", to_json(trace.summary, trace.mode)}};
  if (trace.mode == Mode::kWithPlanning) doc["plan"] = plan_info;
  return doc;
}

void write_run(const Prepared& p, const TraceReport& trace, const json& plan_info, const CommandOptions& options,
               std::vector<std::string>& written) {
  const std::string stem = p.scenario.name + "." + mode_tag(trace.mode);
  std::ostringstream csv;
  write_trace_csv(trace, csv);
  write_atomic(options.out_dir / (stem + ".trace.csv"), csv.str());
  write_atomic(options.out_dir / (stem + ".summary.json"), dump_document(summary_document(p, trace, plan_info)));
  written.push_back(stem + ".trace.csv");
  written.push_back(stem + ".summary.json");
}

json written_json(const std::vector<std::string>& written) { return json(written); }

}  // namespace

CommandResult cmd_plan(const ScenarioConfig& scenario, const CommandOptions& options) {
  const Prepared p = prepare(scenario, options);
  const PlanResult result = plan(p.tube, p.scenario.params, p.planner);
  const std::string name = artifact(p, ".plan.json");
  write_atomic(options.out_dir / name, dump_document(plan_document(p, result)));
  CommandResult out;
  out.written = {name};
  out.exit_code = result.status == PlanStatus::kInfeasible ? kExitInfeasible : kExitOk;
  out.document = {{"ok", out.exit_code == kExitOk},
                  {"command", "plan"},
                  {"scenario", p.scenario.name},
                  {"status", to_string(result.status)},
                  {"objective", result.objective},
                  {"feasible", result.report.feasible},
                  {"written", written_json(out.written)}};
  return out;
}

CommandResult cmd_simulate(const ScenarioConfig& scenario, Mode mode, const std::optional<fs::path>& plan_path,
                           const CommandOptions& options) {
  const Prepared p = prepare(scenario, options);
  CommandResult out;
  PlanSource source;
  if (mode == Mode::kWithPlanning) source = obtain_plan(p, plan_path, options, out.written);
  const TraceReport trace = simulate(p, mode, source.profile);
  write_run(p, trace, source.info, options, out.written);
  out.document = {{"ok", true},
                  {"command", "simulate"},
                  {"scenario", p.scenario.name},
                  {"mode", to_string(mode)},
                  {"completed", trace.completed},
                  {"passing_time", trace.summary.passing_time},
                  {"min_distance", trace.summary.min_distance},
                  {"written", written_json(out.written)}};
  return out;
}

CommandResult cmd_compare(const ScenarioConfig& scenario, const CommandOptions& options) {
  const Prepared p = prepare(scenario, options);
  CommandResult out;
  const PlanSource source = obtain_plan(p, std::nullopt, options, out.written);
  // The two runs share only read-only inputs.
  auto with = std::async(std::launch::async, [&] { return simulate(p, Mode::kWithPlanning, source.profile); });
  auto without = std::async(std::launch::async, [&] { return simulate(p, Mode::kWithoutPlanning, std::nullopt); });
  const TraceReport with_trace = with.get();
  const TraceReport without_trace = without.get();
  write_run(p, with_trace, source.info, options, out.written);
  write_run(p, without_trace, source.info, options, out.written);

  json headline = json::array();
  for (const TraceReport* t : {&with_trace, &without_trace}) {
    headline.push_back(
        {{"mode", to_string(t->mode)}, {"passing_time", t->summary.passing_time}, {"min_distance", t->summary.min_distance}});
  }
  const json doc = {{"format", "tubeswarm.compare/1"},
                    {"scenario", p.scenario.name},
                    {"dt", p.scenario.sim.dt},
                    {"seed", p.scenario.sim.seed},
                    {"headline", headline},
                    {"plan", source.info},
                    {"with_planning", to_json(with_trace.summary, Mode::kWithPlanning)},
                    {"without_planning", to_json(without_trace.summary, Mode::kWithoutPlanning)}};
  const std::string name = artifact(p, ".compare.json");
  write_atomic(options.out_dir / name, dump_document(doc));
  out.written.push_back(name);
  out.document = {{"ok", true},
                  {"command", "compare"},
                  {"scenario", p.scenario.name},
                  {"headline", headline},
                  {"written", written_json(out.written)}};
  return out;
}

CommandResult cmd_validate(const fs::path& plan_path, const ScenarioConfig& scenario, const CommandOptions& options) {
  const Prepared p = prepare(scenario, options);
  const PlanProfile profile = read_plan(plan_path);
  const ConstraintReport report = validate_plan(profile, p.tube, p.scenario.params, p.planner);
  CommandResult out;
  out.exit_code = report.feasible ? kExitOk : kExitInfeasible;
  out.document = {{"ok", report.feasible},
                  {"command", "validate"},
                  {"scenario", p.scenario.name},
                  {"feasible", report.feasible},
                  {"report", to_json(report)}};
  return out;
}

}  // namespace tubeswarm
