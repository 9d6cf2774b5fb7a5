#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tubeswarm/planner.hpp"
#include "tubeswarm/simulator.hpp"
#include "tubeswarm/swarm.hpp"
#include "tubeswarm/tube.hpp"

namespace tubeswarm {

struct SegmentSpec {
  SegmentKind kind = SegmentKind::kStraight;
  double length = 0.0;
  double signed_curvature = 0.0;  // arcs only, positive turns left
};

/// Declarative tube: a start pose, a chain of segments and width samples.
struct TubeSpec {
  Vec2 start{0.0, 0.0};
  double heading = 0.0;  // radians, direction of the initial tangent
  std::vector<SegmentSpec> segments;
  std::vector<double> width_arc_lengths;
  std::vector<double> half_widths;

  VirtualTube build() const;
};

struct ScenarioConfig {
  std::string name;
  std::string description;
  TubeSpec tube;
  SwarmParams params;
  PlannerConfig planner;
  SimConfig sim;

  VirtualTube build_tube() const { return tube.build(); }
  /// Planner settings with the boundary density filled in from the initial
  /// formation when the scenario leaves it open.
  PlannerConfig resolved_planner(const VirtualTube& tube) const;
};

/// Names of the built-in scenarios: caseA, caseB, caseC, caseD, straight.
std::vector<std::string> builtin_scenario_names();
std::optional<ScenarioConfig> builtin_scenario(const std::string& name);

/// Built-in name or path to a scenario JSON file. A "tube": {"file": ...}
/// reference is resolved relative to the scenario file. Throws ConfigError
/// listing every problem found.
ScenarioConfig load_scenario(const std::string& name_or_path);
ScenarioConfig scenario_from_json(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir = std::filesystem::path{});

nlohmann::json to_json(const ScenarioConfig& config);
nlohmann::json to_json(const TubeSpec& tube);
nlohmann::json to_json(const SwarmParams& params);
nlohmann::json to_json(const PlannerConfig& config);

}  // namespace tubeswarm
