#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tubeswarm/controller.hpp"
#include "tubeswarm/swarm.hpp"
#include "tubeswarm/tube.hpp"

namespace tubeswarm {

enum class Mode { kWithPlanning, kWithoutPlanning };

std::string to_string(Mode mode);
/// Accepts "with", "with_planning", "without", "without_planning".
Mode mode_from_string(const std::string& text);

struct SimConfig {
  double dt = 0.01;
  std::optional<double> t_max;  // defaults to 10 L / v_min
  std::uint64_t seed = 0;
  double formation_jitter = 0.05;  // m, uniform per axis, drawn from seed
  bool enforce_rate_limits = true;

  double resolved_t_max(double length, double v_min) const { return t_max.value_or(10.0 * length / v_min); }
};

struct WorldState {
  double time = 0.0;
  std::vector<RobotState> robots;
  Mode mode = Mode::kWithPlanning;
};

/// Counters of the per-step command shaping.
struct ClampCounts {
  long speed_change = 0;    // norm change limited to a_v dt
  long heading_change = 0;  // turn limited to (a_n / |v|) dt
  long degenerate = 0;      // zero resultant replaced by the tangent

  ClampCounts& operator+=(const ClampCounts& o) noexcept {
    speed_change += o.speed_change;
    heading_change += o.heading_change;
    degenerate += o.degenerate;
    return *this;
  }
};

struct RobotSample {
  int id = 0;
  Vec2 position{};
  Vec2 velocity{};
  double avoidance_radius = 0.0;
  double arc_length = 0.0;
  double radial_offset = 0.0;  // signed radial fraction, + on the +n side
};

struct StepRecord {
  double time = 0.0;
  std::vector<RobotSample> robots;
  double density = 0.0;             // rho_r, swarm-level
  double planned_density = 0.0;     // rho_a*(l_center); NaN without a plan
  double mean_forward_speed = 0.0;  // v_a measured
  double planned_speed = 0.0;       // v_a*(l_center)
  double center_arc_length = 0.0;   // mean projected arc length
  double min_distance = 0.0;
  long boundary_violations = 0;     // robots outside lambda(l) with an in-range projection
};

struct TraceMetrics {
  bool completed = false;
  double passing_time = 0.0;
  double min_distance = 0.0;
  long collision_count = 0;
  long boundary_violations = 0;
  double density_tracking_rmse = 0.0;
  long density_tracking_samples = 0;
  double speed_tracking_rmse = 0.0;
  double min_command_norm = 0.0;
  double max_command_norm = 0.0;
  double final_max_avoidance_radius = 0.0;
  ClampCounts clamps{};
  long steps = 0;
};

struct TraceReport {
  Mode mode = Mode::kWithPlanning;
  double dt = 0.0;
  double collision_distance = 0.0;  // 2 r_p
  bool completed = false;
  ClampCounts clamps{};
  std::vector<StepRecord> steps;
  TraceMetrics summary{};
};

/// Grid of ceil(sqrt(N)) columns at the tube entrance, spacing 2 r_a,
/// r_a,i = r_a, commands along the tangent at the initial guidance speed.
/// A nonzero jitter displaces each robot by up to that much per axis,
/// drawn from mt19937_64(seed).
std::vector<RobotState> initial_formation(const VirtualTube& tube, const SwarmParams& params,
                                          const Guidance& guidance, std::uint64_t seed = 0, double jitter = 0.0);

/// One synchronous update: all commands from the current snapshot, shaped
/// by the rate limits, then explicit Euler on positions and avoidance radii.
WorldState step(const WorldState& world, const VirtualTube& tube, double dt, const Guidance& guidance,
                const SwarmParams& params, bool enforce_rate_limits = true, ClampCounts* clamps = nullptr);

/// Steps until the last robot's projection reaches L or t_max elapses.
TraceReport run(const VirtualTube& tube, const SwarmParams& params, const Guidance& guidance, Mode mode,
                const SimConfig& config, std::vector<RobotState> initial);

/// Recomputes the summary from the raw steps.
TraceMetrics metrics(const TraceReport& trace);

nlohmann::json to_json(const TraceMetrics& metrics, Mode mode);

/// time,robot_id,x,y,vx,vy,r_a,l_proj,rho_offset; 17 significant digits.
void write_trace_csv(const TraceReport& trace, std::ostream& out);

}  // namespace tubeswarm
