#include "tubeswarm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "tubeswarm/kernels.hpp"

namespace tubeswarm {

std::string to_string(Mode mode) {
  return mode == Mode::kWithPlanning ? "with_planning" : "without_planning";
}

Mode mode_from_string(const std::string& text) {
  if (text == "with" || text == "with_planning") return Mode::kWithPlanning;
  if (text == "without" || text == "without_planning") return Mode::kWithoutPlanning;
  throw std::invalid_argument("unknown mode '" + text + "' (expected with|without)");
}

std::vector<RobotState> initial_formation(const VirtualTube& tube, const SwarmParams& params,
                                          const Guidance& guidance, std::uint64_t seed, double jitter) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(-1.0, 1.0);
  const int n = params.robot_count;
  const int columns = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + columns - 1) / columns;
  const double spacing = 2.0 * params.r_a;
  std::vector<RobotState> robots;
  robots.reserve(static_cast<std::size_t>(n));
  for (int row = 0; row < rows; ++row) {
    const double l = params.r_a + static_cast<double>(rows - 1 - row) * spacing;
    const int in_row = std::min(columns, n - row * columns);
    const double half_span = 0.5 * static_cast<double>(in_row - 1);
    double lateral = spacing;
    if (in_row > 1) {
      lateral = std::min(spacing, 2.0 * (tube.width(l) - params.r_p) / static_cast<double>(in_row - 1));
    }
    const Vec2 center = tube.center(l);
    const Vec2 normal = tube.normal(l);
    for (int c = 0; c < in_row; ++c) {
      RobotState r;
      r.id = row * columns + c;
      r.position = center + ((static_cast<double>(c) - half_span) * lateral) * normal;
      if (jitter > 0.0) {
        const double dx = jitter * offset(rng);
        const double dy = jitter * offset(rng);
        r.position += Vec2{dx, dy};
      }
      r.avoidance_radius = params.r_a;
      const double speed = std::clamp(guidance.speed(l), params.v_min, params.v_max);
      r.velocity_command = speed * tube.tangent(l);
      robots.push_back(r);
    }
  }
  return robots;
}

namespace {

struct Snapshot {
  std::vector<TubeCoordinates> coords;
  std::vector<double> xs, ys, radii, arc_lengths;
  double density = 0.0;
};

Snapshot take_snapshot(const std::vector<RobotState>& robots, const VirtualTube& tube, const SwarmParams& params) {
  Snapshot s;
  s.coords = project_all(robots, tube);
  for (std::size_t i = 0; i < robots.size(); ++i) {
    s.xs.push_back(robots[i].position.x);
    s.ys.push_back(robots[i].position.y);
    s.radii.push_back(robots[i].avoidance_radius);
    s.arc_lengths.push_back(s.coords[i].arc_length);
  }
  s.density = static_cast<double>(robots.size()) / swarm_area_from_arc_lengths(s.arc_lengths, tube, params.r_p);
  return s;
}

// Limits the change from the previously applied command: norm by a_v dt,
// heading by (a_n / |v|) dt.
Vec2 shape_command(const Vec2& previous, const Vec2& wanted, double dt, const SwarmParams& params,
                   ClampCounts& clamps) {
  const double prev_speed = norm(previous);
  if (prev_speed < 1e-12) return wanted;
  const double want_speed = norm(wanted);
  double speed = std::clamp(want_speed, prev_speed - params.a_v * dt, prev_speed + params.a_v * dt);
  speed = std::clamp(speed, params.v_min, params.v_max);
  if (speed != want_speed) ++clamps.speed_change;
  const double turn = std::atan2(cross(previous, wanted), dot(previous, wanted));
  const double max_turn = params.a_n / speed * dt;
  const double applied = std::clamp(turn, -max_turn, max_turn);
  if (applied != turn) ++clamps.heading_change;
  if (speed == want_speed && applied == turn) return wanted;
  return speed * rotate(previous * (1.0 / prev_speed), applied);
}

WorldState advance(const WorldState& world, const Snapshot& snap, double dt, const Guidance& guidance,
                   const SwarmParams& params, bool enforce_rate_limits, ClampCounts& clamps) {
  const auto& kernel = kernels::active();
  WorldState next = world;
  const double r_a_max = params.r_a_max();
  for (std::size_t i = 0; i < world.robots.size(); ++i) {
    const RobotState& robot = world.robots[i];
    const TubeCoordinates& c = snap.coords[i];
    const Vec2 interaction =
        params.k_m * kernel.repulsion_sum(robot.position, robot.avoidance_radius, snap.xs, snap.ys, snap.radii,
                                          params.r_s);
    ControlCommand cmd = compose_command(forward_velocity(c, guidance), interaction,
                                         boundary_velocity(robot, c, params), c, params);
    if (cmd.degenerate) ++clamps.degenerate;
    const Vec2 applied =
        enforce_rate_limits ? shape_command(robot.velocity_command, cmd.velocity, dt, params, clamps) : cmd.velocity;
    const double radius_rate =
        guidance.has_plan() ? avoidance_radius_rate(snap.density, guidance.density(c.arc_length), params.k_ra) : 0.0;
    RobotState& out = next.robots[i];
    out.velocity_command = applied;
    out.position = robot.position + dt * applied;
    out.avoidance_radius = std::min(robot.avoidance_radius + radius_rate * dt, r_a_max);
  }
  next.time = world.time + dt;
  return next;
}

StepRecord record(const WorldState& world, const Snapshot& snap, const VirtualTube& tube, const Guidance& guidance,
                  const SwarmParams& params) {
  StepRecord rec;
  rec.time = world.time;
  rec.density = snap.density;
  double forward_sum = 0.0;
  double l_sum = 0.0;
  for (std::size_t i = 0; i < world.robots.size(); ++i) {
    const auto& r = world.robots[i];
    const auto& c = snap.coords[i];
    rec.robots.push_back({r.id, r.position, r.velocity_command, r.avoidance_radius, c.arc_length,
                          c.positive_side ? c.radial_fraction : -c.radial_fraction});
    forward_sum += dot(r.velocity_command, c.tangent);
    l_sum += c.arc_length;
    if (!c.out_of_tube && c.arc_length > 0.0 && c.arc_length < tube.total_length() &&
        c.radial_fraction * c.width > c.width) {
      ++rec.boundary_violations;
    }
  }
  const double n = static_cast<double>(world.robots.size());
  rec.mean_forward_speed = forward_sum / n;
  rec.center_arc_length = l_sum / n;
  rec.planned_speed = guidance.speed(rec.center_arc_length);
  rec.planned_density =
        guidance.has_plan() ? guidance.density(rec.center_arc_length) : std::numeric_limits<double>::quiet_NaN();
  rec.min_distance = world.robots.size() >= 2 ? min_pairwise_distance(snap.xs, snap.ys)
                                              : std::numeric_limits<double>::infinity();
  (void)params;
  return rec;
}

}  // namespace

WorldState step(const WorldState& world, const VirtualTube& tube, double dt, const Guidance& guidance,
                const SwarmParams& params, bool enforce_rate_limits, ClampCounts* clamps) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  ClampCounts local;
  const Snapshot snap = take_snapshot(world.robots, tube, params);
  WorldState next = advance(world, snap, dt, guidance, params, enforce_rate_limits, local);
  if (clamps != nullptr) *clamps += local;
  return next;
}

TraceReport run(const VirtualTube& tube, const SwarmParams& params, const Guidance& guidance, Mode mode,
                const SimConfig& config, std::vector<RobotState> initial) {
  if (!(config.dt > 0.0)) throw std::invalid_argument("time step must be positive");
  TraceReport trace;
  trace.mode = mode;
  trace.dt = config.dt;
  trace.collision_distance = 2.0 * params.r_p;
  WorldState world{0.0, std::move(initial), mode};
  const double t_max = config.resolved_t_max(tube.total_length(), params.v_min);
  const double finish = tube.total_length() * (1.0 - 1e-12);
  const auto max_steps = static_cast<long>(std::ceil(t_max / config.dt));
  for (long k = 0;; ++k) {
    const Snapshot snap = take_snapshot(world.robots, tube, params);
    trace.steps.push_back(record(world, snap, tube, guidance, params));
    const double last_l = *std::min_element(snap.arc_lengths.begin(), snap.arc_lengths.end());
    if (last_l >= finish) {
      trace.completed = true;
      break;
    }
    if (k >= max_steps) break;
    world = advance(world, snap, config.dt, guidance, params, config.enforce_rate_limits, trace.clamps);
    // Accumulate from the step count to keep times free of summation drift.
    world.time = static_cast<double>(k + 1) * config.dt;
  }
  trace.summary = metrics(trace);
  return trace;
}

TraceMetrics metrics(const TraceReport& trace) {
  if (trace.steps.empty()) throw std::invalid_argument("metrics need a non-empty trace");
  TraceMetrics m;
  m.completed = trace.completed;
  m.passing_time = trace.completed ? trace.steps.back().time : 0.0;
  m.min_distance = std::numeric_limits<double>::infinity();
  m.min_command_norm = std::numeric_limits<double>::infinity();
  m.clamps = trace.clamps;
  m.steps = static_cast<long>(trace.steps.size());
  double density_sq = 0.0;
  double speed_sq = 0.0;
  for (const auto& s : trace.steps) {
    m.min_distance = std::min(m.min_distance, s.min_distance);
    if (s.min_distance < trace.collision_distance) ++m.collision_count;
    m.boundary_violations += s.boundary_violations;
    if (!std::isnan(s.planned_density) && s.density > s.planned_density) {
      const double e = s.density - s.planned_density;
      density_sq += e * e;
      ++m.density_tracking_samples;
    }
    const double e = s.mean_forward_speed - s.planned_speed;
    speed_sq += e * e;
    for (const auto& r : s.robots) {
      const double speed = norm(r.velocity);
      m.min_command_norm = std::min(m.min_command_norm, speed);
      m.max_command_norm = std::max(m.max_command_norm, speed);
    }
  }
  for (const auto& r : trace.steps.back().robots) {
    m.final_max_avoidance_radius = std::max(m.final_max_avoidance_radius, r.avoidance_radius);
  }
  if (m.density_tracking_samples > 0) {
    m.density_tracking_rmse = std::sqrt(density_sq / static_cast<double>(m.density_tracking_samples));
  }
  m.speed_tracking_rmse = std::sqrt(speed_sq / static_cast<double>(trace.steps.size()));
  return m;
}

nlohmann::json to_json(const TraceMetrics& m, Mode mode) {
  return {
      {"mode", to_string(mode)},
      {"completed", m.completed},
      {"passing_time", m.passing_time},
      {"min_distance", m.min_distance},
      {"collision_count", m.collision_count},
      {"boundary_violations", m.boundary_violations},
      {"density_tracking_rmse", m.density_tracking_rmse},
      {"density_tracking_samples", m.density_tracking_samples},
      {"speed_tracking_rmse", m.speed_tracking_rmse},
      {"min_command_norm", m.min_command_norm},
      {"max_command_norm", m.max_command_norm},
      {"final_max_avoidance_radius", m.final_max_avoidance_radius},
      {"steps", m.steps},
      {"clamp_events",
       {{"speed_change", m.clamps.speed_change},
        {"heading_change", m.clamps.heading_change},
        {"degenerate", m.clamps.degenerate}}},
  };
}

void write_trace_csv(const TraceReport& trace, std::ostream& out) {
  out << "time,robot_id,x,y,vx,vy,r_a,l_proj,rho_offset\n";
  char line[512];
  for (const auto& s : trace.steps) {
    for (const auto& r : s.robots) {
      std::snprintf(line, sizeof(line), "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.time, r.id,
                    r.position.x, r.position.y, r.velocity.x, r.velocity.y, r.avoidance_radius, r.arc_length,
                    r.radial_offset);
      out << line;
    }
  }
}

}  // namespace tubeswarm
