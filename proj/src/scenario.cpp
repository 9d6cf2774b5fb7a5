#include "tubeswarm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <type_traits>
#include <sstream>

#include "tubeswarm/errors.hpp"

namespace tubeswarm {

using nlohmann::json;

VirtualTube TubeSpec::build() const {
  TubeBuilder builder(start, Vec2{std::cos(heading), std::sin(heading)});
  for (const auto& s : segments) {
    if (s.kind == SegmentKind::kStraight) {
      builder.straight(s.length);
    } else {
      builder.arc(s.length, s.signed_curvature);
    }
  }
  return builder.build(WidthProfile(width_arc_lengths, half_widths));
}

PlannerConfig ScenarioConfig::resolved_planner(const VirtualTube& built) const {
  PlannerConfig out = planner;
  if (!out.boundary_density) {
    const auto robots =
        initial_formation(built, params, Guidance::baseline(params.v_min), sim.seed, sim.formation_jitter);
    out.boundary_density = swarm_density(robots, built, params.r_p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Built-ins. All tubes are 50 m long, 5 m half-width at the entrance and
// 1.2 m at the narrowest section. The curved cases bend through 90 degrees
// on a 25 m radius between two equal straights.

namespace {

constexpr double kLength = 50.0;
constexpr double kEntryWidth = 5.0;
constexpr double kNarrowWidth = 1.2;
constexpr double kBendRadius = 25.0;

TubeSpec straight_tube(double taper_start, double taper_end) {
  TubeSpec t;
  t.segments = {{SegmentKind::kStraight, kLength, 0.0}};
  t.width_arc_lengths = {0.0, taper_start, taper_end, kLength};
  t.half_widths = {kEntryWidth, kEntryWidth, kNarrowWidth, kNarrowWidth};
  return t;
}

TubeSpec curved_tube(double taper_start, double taper_end) {
  TubeSpec t = straight_tube(taper_start, taper_end);
  const double bend = kBendRadius * std::numbers::pi / 2.0;
  const double lead = 0.5 * (kLength - bend);
  t.segments = {{SegmentKind::kStraight, lead, 0.0},
                {SegmentKind::kArc, bend, 1.0 / kBendRadius},
                {SegmentKind::kStraight, lead, 0.0}};
  return t;
}

ScenarioConfig make_case(std::string name, std::string description, TubeSpec tube) {
  ScenarioConfig c;
  c.name = std::move(name);
  c.description = std::move(description);
  c.tube = std::move(tube);
  return c;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() { return {"caseA", "caseB", "caseC", "caseD", "straight"}; }

std::optional<ScenarioConfig> builtin_scenario(const std::string& name) {
  if (name == "caseA") {
    return make_case(name, "straight tube, half-width 5 m narrowing linearly to 1.2 m over l in [15, 35]",
                     straight_tube(15.0, 35.0));
  }
  if (name == "caseB") {
    return make_case(name,
                     "5.365 m straight, 90 deg left arc of radius 25 m, 5.365 m straight; half-width 5 m "
                     "narrowing to 1.2 m over l in [15, 35]",
                     curved_tube(15.0, 35.0));
  }
  if (name == "caseC") {
    return make_case(name, "straight tube, half-width 5 m narrowing linearly to 1.2 m over l in [25, 30]",
                     straight_tube(25.0, 30.0));
  }
  if (name == "caseD") {
    return make_case(name,
                     "5.365 m straight, 90 deg left arc of radius 25 m, 5.365 m straight; half-width 5 m "
                     "narrowing to 1.2 m over l in [25, 30]",
                     curved_tube(25.0, 30.0));
  }
  if (name == "straight") {
    ScenarioConfig c;
    c.name = name;
    c.description = "straight tube of constant half-width 5 m; entry at v_max and the desired density";
    c.tube.segments = {{SegmentKind::kStraight, kLength, 0.0}};
    c.tube.width_arc_lengths = {0.0, kLength};
    c.tube.half_widths = {kEntryWidth, kEntryWidth};
    c.planner.boundary_speed = c.params.v_max;
    c.planner.boundary_density = c.params.rho_d;
    return c;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Serialization

json to_json(const TubeSpec& tube) {
  json segments = json::array();
  for (const auto& s : tube.segments) {
    if (s.kind == SegmentKind::kStraight) {
      segments.push_back({{"type", "straight"}, {"length", s.length}});
    } else {
      segments.push_back({{"type", "arc"}, {"length", s.length}, {"curvature", s.signed_curvature}});
    }
  }
  return {{"start", {tube.start.x, tube.start.y}},
          {"heading", tube.heading},
          {"segments", segments},
          {"width", {{"arc_lengths", tube.width_arc_lengths}, {"half_widths", tube.half_widths}}}};
}

json to_json(const SwarmParams& p) {
  json j = {{"robot_count", p.robot_count}, {"v_min", p.v_min}, {"v_max", p.v_max}, {"a_v", p.a_v},
            {"a_n", p.a_n},                 {"r_p", p.r_p},     {"r_s", p.r_s},     {"r_a", p.r_a},
            {"rho_d", p.rho_d},             {"k_ra", p.k_ra},   {"k_m", p.k_m},     {"k_xy", p.k_xy},
            {"r_a_max_factor", p.r_a_max_factor}};
  if (p.rho_max_override) j["rho_max"] = *p.rho_max_override;
  return j;
}

json to_json(const PlannerConfig& c) {
  json j = {{"collocation_count", c.collocation_count},
            {"segment_count", c.segment_count},
            {"tolerance", c.tolerance},
            {"max_iterations", c.max_iterations},
            {"probe_seed", c.probe_seed}};
  if (c.delta_l) j["delta_l"] = *c.delta_l;
  if (c.rho_rate_limit) j["rho_rate_limit"] = *c.rho_rate_limit;
  if (c.boundary_speed) j["boundary_speed"] = *c.boundary_speed;
  if (c.boundary_density) j["boundary_density"] = *c.boundary_density;
  return j;
}

json to_json(const ScenarioConfig& c) {
  json sim = {{"dt", c.sim.dt}, {"seed", c.sim.seed}, {"formation_jitter", c.sim.formation_jitter}};
  if (c.sim.t_max) sim["t_max"] = *c.sim.t_max;
  return {{"format", "tubeswarm.scenario/1"},
          {"name", c.name},
          {"description", c.description},
          {"tube", to_json(c.tube)},
          {"params", to_json(c.params)},
          {"planner", to_json(c.planner)},
          {"sim", sim}};
}

// ---------------------------------------------------------------------------
// Parsing. Every problem is collected with its JSON path before throwing.

namespace {

class Reader {
 public:
  std::vector<ConfigIssue> issues;

  void fail(const std::string& path, const std::string& message) { issues.push_back({path, message}); }

  // False (with an issue) unless j is an object whose keys are all allowed.
  bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (const auto& item : j.items()) {
      bool known = false;
      for (const char* key : allowed) known = known || item.key() == key;
      if (!known) fail(path + "." + item.key(), "unknown key");
    }
    return true;
  }

  void number(const json& j, const char* key, const std::string& path, double& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number()) {
      fail(path + "." + key, "expected a number");
      return;
    }
    out = v.get<double>();
  }

  void number(const json& j, const char* key, const std::string& path, std::optional<double>& out) {
    if (!j.contains(key)) return;
    double value = 0.0;
    const auto before = issues.size();
    number(j, key, path, value);
    if (issues.size() == before) out = value;
  }

  template <class Int>
  void integer(const json& j, const char* key, const std::string& path, Int& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_integer()) {
      fail(path + "." + key, "expected an integer");
      return;
    }
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned()) {
        out = v.get<Int>();
      } else {
        fail(path + "." + key, "expected a non-negative integer");
      }
    } else {
      out = v.get<Int>();
    }
  }

  void text(const json& j, const char* key, const std::string& path, std::string& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_string()) {
      fail(path + "." + key, "expected a string");
      return;
    }
    out = v.get<std::string>();
  }

  std::vector<double> numbers(const json& j, const std::string& path) {
    std::vector<double> out;
    if (!j.is_array()) {
      fail(path, "expected an array of numbers");
      return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) {
        fail(path + "[" + std::to_string(i) + "]", "expected a number");
        continue;
      }
      out.push_back(j[i].get<double>());
    }
    return out;
  }
};

json read_json_file(const std::filesystem::path& path, const std::string& json_path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(json_path, "cannot open file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(json_path, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void parse_tube(Reader& r, const json& j, const std::string& path, TubeSpec& tube) {
  if (!r.object(j, path, {"start", "heading", "segments", "width"})) return;
  if (j.contains("start")) {
    const auto start = r.numbers(j.at("start"), path + ".start");
    if (start.size() == 2) {
      tube.start = {start[0], start[1]};
    } else if (j.at("start").is_array()) {
      r.fail(path + ".start", "expected [x, y]");
    }
  }
  r.number(j, "heading", path, tube.heading);

  if (!j.contains("segments")) {
    r.fail(path + ".segments", "required");
  } else if (!j.at("segments").is_array() || j.at("segments").empty()) {
    r.fail(path + ".segments", "expected a non-empty array");
  } else {
    const json& segs = j.at("segments");
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const std::string sp = path + ".segments[" + std::to_string(i) + "]";
      if (!r.object(segs[i], sp, {"type", "length", "curvature"})) continue;
      SegmentSpec s;
      std::string type;
      r.text(segs[i], "type", sp, type);
      r.number(segs[i], "length", sp, s.length);
      if (!segs[i].contains("length")) r.fail(sp + ".length", "required");
      if (type == "straight") {
        if (segs[i].contains("curvature")) r.fail(sp + ".curvature", "not allowed on a straight segment");
      } else if (type == "arc") {
        s.kind = SegmentKind::kArc;
        r.number(segs[i], "curvature", sp, s.signed_curvature);
        if (!segs[i].contains("curvature")) r.fail(sp + ".curvature", "required");
      } else {
        r.fail(sp + ".type", "expected \"straight\" or \"arc\"");
      }
      tube.segments.push_back(s);
    }
  }

  if (!j.contains("width")) {
    r.fail(path + ".width", "required");
  } else if (r.object(j.at("width"), path + ".width", {"arc_lengths", "half_widths"})) {
    const json& w = j.at("width");
    if (!w.contains("arc_lengths")) r.fail(path + ".width.arc_lengths", "required");
    if (!w.contains("half_widths")) r.fail(path + ".width.half_widths", "required");
    if (w.contains("arc_lengths")) tube.width_arc_lengths = r.numbers(w.at("arc_lengths"), path + ".width.arc_lengths");
    if (w.contains("half_widths")) tube.half_widths = r.numbers(w.at("half_widths"), path + ".width.half_widths");
  }
}

void parse_params(Reader& r, const json& j, const std::string& path, SwarmParams& p) {
  if (!r.object(j, path,
                {"robot_count", "v_min", "v_max", "a_v", "a_n", "r_p", "r_s", "r_a", "rho_d", "rho_max", "k_ra",
                 "k_m", "k_xy", "r_a_max_factor"})) {
    return;
  }
  r.integer(j, "robot_count", path, p.robot_count);
  r.number(j, "v_min", path, p.v_min);
  r.number(j, "v_max", path, p.v_max);
  r.number(j, "a_v", path, p.a_v);
  r.number(j, "a_n", path, p.a_n);
  r.number(j, "r_p", path, p.r_p);
  r.number(j, "r_s", path, p.r_s);
  r.number(j, "r_a", path, p.r_a);
  r.number(j, "rho_d", path, p.rho_d);
  r.number(j, "rho_max", path, p.rho_max_override);
  r.number(j, "k_ra", path, p.k_ra);
  r.number(j, "k_m", path, p.k_m);
  r.number(j, "k_xy", path, p.k_xy);
  r.number(j, "r_a_max_factor", path, p.r_a_max_factor);
}

void parse_planner(Reader& r, const json& j, const std::string& path, PlannerConfig& c) {
  if (!r.object(j, path,
                {"collocation_count", "segment_count", "delta_l", "rho_rate_limit", "tolerance", "max_iterations",
                 "boundary_speed", "boundary_density", "probe_seed"})) {
    return;
  }
  r.integer(j, "collocation_count", path, c.collocation_count);
  r.integer(j, "segment_count", path, c.segment_count);
  r.number(j, "delta_l", path, c.delta_l);
  r.number(j, "rho_rate_limit", path, c.rho_rate_limit);
  r.number(j, "tolerance", path, c.tolerance);
  r.integer(j, "max_iterations", path, c.max_iterations);
  r.number(j, "boundary_speed", path, c.boundary_speed);
  r.number(j, "boundary_density", path, c.boundary_density);
  r.integer(j, "probe_seed", path, c.probe_seed);
}

void parse_sim(Reader& r, const json& j, const std::string& path, SimConfig& s) {
  if (!r.object(j, path, {"dt", "t_max", "seed", "formation_jitter"})) return;
  r.number(j, "dt", path, s.dt);
  r.number(j, "t_max", path, s.t_max);
  r.integer(j, "seed", path, s.seed);
  r.number(j, "formation_jitter", path, s.formation_jitter);
}

}  // namespace

ScenarioConfig scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
  Reader r;
  ScenarioConfig c;
  if (!r.object(doc, "$", {"format", "name", "description", "tube", "params", "planner", "sim"})) {
    throw ConfigError(r.issues);
  }
  if (doc.contains("format") && doc.at("format") != "tubeswarm.scenario/1") {
    r.fail("$.format", "expected \"tubeswarm.scenario/1\"");
  }
  r.text(doc, "name", "$", c.name);
  if (!doc.contains("name")) {
    r.fail("$.name", "required");
  } else if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
    r.fail("$.name", "must be a non-empty file-name-safe string");
  }
  r.text(doc, "description", "$", c.description);

  if (!doc.contains("tube")) {
    r.fail("$.tube", "required");
  } else {
    const json& t = doc.at("tube");
    if (t.is_object() && t.contains("file")) {
      if (t.size() != 1) r.fail("$.tube", "a file reference cannot be mixed with inline fields");
      if (!t.at("file").is_string()) {
        r.fail("$.tube.file", "expected a string");
      } else {
        const std::filesystem::path file = base_dir / t.at("file").get<std::string>();
        if (!std::filesystem::exists(file)) {
          r.fail("$.tube.file", "referenced file '" + file.string() + "' does not exist");
        } else {
          try {
            parse_tube(r, read_json_file(file, "$.tube.file"), "$.tube.file", c.tube);
          } catch (const ConfigError& e) {
            r.issues.insert(r.issues.end(), e.issues().begin(), e.issues().end());
          }
        }
      }
    } else {
      parse_tube(r, t, "$.tube", c.tube);
    }
  }
  if (doc.contains("params")) parse_params(r, doc.at("params"), "$.params", c.params);
  if (doc.contains("planner")) parse_planner(r, doc.at("planner"), "$.planner", c.planner);
  if (doc.contains("sim")) parse_sim(r, doc.at("sim"), "$.sim", c.sim);

  for (const auto& v : c.params.violations()) r.fail("$.params", v);
  for (const auto& v : c.planner.violations()) r.fail("$.planner", v);
  if (!(c.sim.dt > 0.0) || !std::isfinite(c.sim.dt)) r.fail("$.sim.dt", "must be positive and finite");
  if (c.sim.t_max && !(*c.sim.t_max > 0.0)) r.fail("$.sim.t_max", "must be positive");
  if (!(c.sim.formation_jitter >= 0.0)) r.fail("$.sim.formation_jitter", "must be non-negative");

  if (r.issues.empty()) {
    try {
      (void)c.build_tube();
    } catch (const std::exception& e) {
      r.fail("$.tube", e.what());
    }
  }
  if (!r.issues.empty()) throw ConfigError(r.issues);
  return c;
}

ScenarioConfig load_scenario(const std::string& name_or_path) {
  if (auto builtin = builtin_scenario(name_or_path)) return *builtin;
  const std::filesystem::path path(name_or_path);
  if (!std::filesystem::exists(path)) {
    std::string names;
    for (const auto& n : builtin_scenario_names()) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("$", "'" + name_or_path + "' is neither a file nor a built-in scenario (" + names + ")");
  }
  return scenario_from_json(read_json_file(path, "$"), path.parent_path());
}

}  // namespace tubeswarm
