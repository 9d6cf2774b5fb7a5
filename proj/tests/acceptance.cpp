// End-to-end acceptance run: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "tubeswarm/commands.hpp"
#include "tubeswarm/planner.hpp"

using namespace tubeswarm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kCases[] = {"caseA", "caseB", "caseC", "caseD"};

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("criterion %d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), format, value);
  return buffer;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Planned {
  ScenarioConfig scenario;
  VirtualTube tube;
  PlannerConfig config;
  PlanResult result;
};

Planned plan_scenario(const std::string& name) {
  ScenarioConfig s = load_scenario(name);
  VirtualTube tube = s.build_tube();
  PlannerConfig config = s.resolved_planner(tube);
  PlanResult result = plan(tube, s.params, config);
  return {std::move(s), std::move(tube), std::move(config), std::move(result)};
}

std::vector<double> dense_grid(const Planned& p) {
  const int intervals = p.config.segment_count * p.config.collocation_count * 10;
  std::vector<double> grid;
  for (int j = 0; j <= intervals; ++j) grid.push_back(p.tube.total_length() * j / intervals);
  return grid;
}

void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  const Planned p = plan_scenario("straight");
  const double elapsed = seconds_since(start);
  double speed_err = 0.0;
  double density_err = 0.0;
  for (double l : dense_grid(p)) {
    const auto s = p.result.profile.evaluate(l);
    speed_err = std::max(speed_err, std::abs(s.speed - 5.0) / 5.0);
    density_err = std::max(density_err, std::abs(s.density - 0.1989) / 0.1989);
  }
  report(1, speed_err <= 0.01 && density_err <= 0.01 && elapsed < 30.0,
         "max rel. error speed " + fmt("%.2e", speed_err) + ", density " + fmt("%.2e", density_err) +
             "; planner " + fmt("%.2f", elapsed) + " s (limit 30 s)");
}

void criterion_2(const std::map<std::string, Planned>& plans) {
  bool pass = true;
  std::string detail;
  for (const auto& [name, p] : plans) {
    const ConstraintReport r = validate_plan(p.result.profile, p.tube, p.scenario.params, p.config);
    double worst = 0.0;
    for (const auto& e : r.entries) worst = std::max(worst, e.max_residual);
    pass = pass && worst <= 1e-6 && r.grid_points == dense_grid(p).size();
    detail += name + " max residual " + fmt("%.1e", worst) + " (" + to_string(p.result.status) + "); ";
  }
  report(2, pass, detail + "limit 1e-6 on the 10x grid");
}

void criterion_3() {
  const double value = max_density_rate(20, 5.0, 0.8);
  report(3, std::abs(value - 0.5524) <= 1e-4, "max_density_rate(20, 5, 0.8) = " + fmt("%.6f", value));
}

void criterion_4() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double length = 30.0 + 70.0 * unit(rng);
    const double w0 = 0.5 + 6.0 * unit(rng);
    const double w1 = 0.5 + 6.0 * unit(rng);
    const oracle::LinearWidth w{w0, (w1 - w0) / length};
    const auto tube =
        TubeBuilder({0.0, 0.0}, {1.0, 0.0}).straight(length).build(WidthProfile({0.0, length}, {w0, w1}));
    const int n = 1 + static_cast<int>(40 * unit(rng));
    const double l = length * (0.3 + 0.3 * unit(rng));
    const double shift = 0.1 + 6.0 * unit(rng);
    const double window = 0.5 + 10.0 * unit(rng);
    const double rho = n / (2.0 * window * w.at(l));
    const double expected = oracle::linear_shifted_density(w, rho, l, shift);
    worst = std::max(worst, std::abs(predicted_density(tube, n, rho, l, shift) - expected) / expected);
  }
  report(4, worst <= 1e-9, "worst relative error over 100 linear profiles " + fmt("%.2e", worst));
}

struct Compared {
  json doc;
  double seconds = 0.0;
};

void criteria_5_6(const std::map<std::string, Compared>& runs) {
  bool safe = true;
  bool fast = true;
  std::string safety, speed;
  for (const char* name : kCases) {
    const Compared& c = runs.at(name);
    const json& with = c.doc["with_planning"];
    const json& without = c.doc["without_planning"];
    const double dw = with["min_distance"];
    const double dn = without["min_distance"];
    const double tw = with["passing_time"];
    const double tn = without["passing_time"];
    const bool done = with["completed"] && without["completed"];
    safe = safe && dw > dn && dw >= 0.6 && with["collision_count"] == 0 && c.seconds < 60.0;
    fast = fast && done && tw < tn;
    safety += std::string(name) + " " + fmt("%.3f", dw) + " vs " + fmt("%.3f", dn) + " m in " +
              fmt("%.1f", c.seconds) + " s; ";
    speed += std::string(name) + " " + fmt("%.2f", tw) + " vs " + fmt("%.2f", tn) + " s; ";
  }
  report(5, safe, "min distance with vs without: " + safety + "need with > without and >= 0.6, < 60 s");
  report(6, fast, "passing time with vs without: " + speed);
}

void criterion_7(const std::map<std::string, Planned>& plans) {
  bool pass = true;
  std::string detail;
  for (const char* name : {"caseC", "caseD"}) {
    const Planned& p = plans.at(name);
    double argmin_rho = 0.0, min_rho = 1e300, argmin_width = 0.0, min_width = 1e300;
    for (double l : dense_grid(p)) {
      const double rho = p.result.profile.evaluate(l).density;
      const double width = p.tube.width(l);
      if (rho < min_rho) {
        min_rho = rho;
        argmin_rho = l;
      }
      if (width < min_width) {
        min_width = width;
        argmin_width = l;
      }
    }
    // Lowest planned density inside the taper, for context.
    double taper_min = 1e300;
    for (double l : dense_grid(p)) {
      if (l <= argmin_width && p.tube.width(l) < p.tube.width(0.0)) {
        taper_min = std::min(taper_min, p.result.profile.evaluate(l).density);
      }
    }
    pass = pass && argmin_rho < argmin_width;
    detail += std::string(name) + " argmin planned density at l = " + fmt("%.2f", argmin_rho) + " (" +
              fmt("%.4f", min_rho) + "), narrowest from l = " + fmt("%.2f", argmin_width) + ", lowest in the taper " +
              fmt("%.4f", taper_min) + "; ";
  }
  report(7, pass, detail);
}

// Density error over the steps above the plan, in consecutive one-second
// windows after the first expansion; speed error over the whole run.
void criterion_8(const Planned& a, const json& summary) {
  const auto& params = a.scenario.params;
  const Guidance guidance = Guidance::planned(a.result.profile);
  auto robots = initial_formation(a.tube, params, guidance, a.scenario.sim.seed, a.scenario.sim.formation_jitter);
  const TraceReport trace = run(a.tube, params, guidance, Mode::kWithPlanning, a.scenario.sim, std::move(robots));
  const bool consistent = to_json(trace.summary, trace.mode) == summary;

  std::size_t first = trace.steps.size();
  for (std::size_t k = 1; k < trace.steps.size() && first == trace.steps.size(); ++k) {
    for (std::size_t i = 0; i < trace.steps[k].robots.size(); ++i) {
      if (trace.steps[k].robots[i].avoidance_radius > trace.steps[k - 1].robots[i].avoidance_radius) first = k;
    }
  }
  const std::size_t window = static_cast<std::size_t>(std::lround(1.0 / trace.dt));
  std::vector<double> window_rmse;
  for (std::size_t start = first; start < trace.steps.size(); start += window) {
    std::vector<double> errors;
    for (std::size_t k = start; k < std::min(start + window, trace.steps.size()); ++k) {
      const auto& s = trace.steps[k];
      if (s.density > s.planned_density) errors.push_back(s.density - s.planned_density);
    }
    if (!errors.empty()) window_rmse.push_back(oracle::rms(errors));
  }
  bool monotone = !window_rmse.empty();
  for (std::size_t i = 1; i < window_rmse.size(); ++i) monotone = monotone && window_rmse[i] <= window_rmse[i - 1];
  std::string series;
  for (double v : window_rmse) series += fmt("%.3f ", v);
  const double speed = trace.summary.speed_tracking_rmse;
  report(8, monotone && speed <= 0.25 && consistent,
         "caseA speed rmse " + fmt("%.3f", speed) + " (limit 0.25); density rmse per 1 s window from t = " +
             fmt("%.2f", trace.steps[std::min(first, trace.steps.size() - 1)].time) + " s: " + series +
             (monotone ? "(non-increasing)" : "(not non-increasing)") +
             (consistent ? "" : "; rerun disagrees with the compare summary"));
}

void criterion_9(const fs::path& out) {
  double lo = 1e300, hi = 0.0;
  long rows = 0;
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    if (e.path().string().size() < 10 || e.path().extension() != ".csv") continue;
    ++files;
    std::ifstream in(e.path());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      double v[9];
      std::istringstream row(line);
      std::string cell;
      for (double& x : v) {
        std::getline(row, cell, ',');
        x = std::strtod(cell.c_str(), nullptr);
      }
      const double speed = std::hypot(v[4], v[5]);
      lo = std::min(lo, speed);
      hi = std::max(hi, speed);
      ++rows;
    }
  }
  report(9, files == 10 && lo >= 2.0 - 1e-9 && hi <= 5.0 + 1e-9,
         std::to_string(rows) + " commands in " + std::to_string(files) + " traces, norms in [" + fmt("%.6f", lo) +
             ", " + fmt("%.6f", hi) + "]");
}

void criterion_10(const fs::path& out) {
  const ScenarioConfig b = load_scenario("caseB");
  const fs::path first = out / "determinism_1";
  const fs::path second = out / "determinism_2";
  fs::remove_all(first);
  fs::remove_all(second);
  (void)cmd_compare(b, {first});
  (void)cmd_compare(b, {second});
  bool same = true;
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(first)) {
    const auto name = e.path().filename();
    same = same && fs::exists(second / name) && slurp(e.path()) == slurp(second / name);
    ++compared;
  }
  report(10, same && compared == 6,
         std::to_string(compared) + " caseB artifacts (summaries, compare, plan, traces) byte-identical across two runs");
}

void criterion_11(const std::string& property_binary) {
  const std::string command = "'" + property_binary + "' --cases=1000";
  const int status = std::system(command.c_str());
  report(11, status == 0, "property suites at 1000 cases each (" + property_binary + ")");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria", "acceptance_tests"};
  std::string out_dir = "acceptance_out";
  std::string property_binary = TUBESWARM_PROPERTY_BINARY;
  app.add_option("--out", out_dir, "Directory for run artifacts");
  app.add_option("--properties", property_binary, "Property suite binary");
  CLI11_PARSE(app, argc, argv);
  const fs::path out(out_dir);
  fs::remove_all(out);
  fs::create_directories(out);

  criterion_1();

  std::map<std::string, Planned> plans;
  for (const char* name : kCases) plans.emplace(name, plan_scenario(name));
  criterion_2(plans);
  criterion_3();
  criterion_4();

  std::map<std::string, Compared> runs;
  for (const char* name : {"caseA", "caseB", "caseC", "caseD", "straight"}) {
    const auto start = std::chrono::steady_clock::now();
    (void)cmd_compare(load_scenario(name), {out});
    runs[name] = {json::parse(slurp(out / (std::string(name) + ".compare.json"))), seconds_since(start)};
  }
  criteria_5_6(runs);
  criterion_7(plans);
  criterion_8(plans.at("caseA"), runs.at("caseA").doc["with_planning"]);
  criterion_9(out);
  criterion_10(out);
  criterion_11(property_binary);

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
