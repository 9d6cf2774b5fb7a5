#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tubeswarm/tube.hpp"
#include "tubeswarm/vec2.hpp"

namespace tubeswarm {

struct RobotState {
  int id = 0;
  Vec2 position{};
  Vec2 velocity_command{};   // zero until the first command is issued
  double avoidance_radius = 0.0;
};

/// Physical constants of the swarm and the controller gains.
struct SwarmParams {
  int robot_count = 20;
  double v_min = 2.0;     // m/s
  double v_max = 5.0;     // m/s
  double a_v = 1.0;       // m/s^2, tangential
  double a_n = 1.0;       // m/s^2, normal
  double r_p = 0.3;       // physical radius, m
  double r_s = 0.4;       // safety radius, m
  double r_a = 0.8;       // nominal avoidance radius, m
  double rho_d = 0.1989;  // desired density, robots/m^2
  std::optional<double> rho_max_override;  // defaults to 1 / r_p^2
  double k_ra = 2.0;      // density tracking gain
  double k_m = 2.5;       // inter-robot repulsion gain, 1/s
  double k_xy = 0.4;      // boundary gain, 1/s
  double r_a_max_factor = 2.0;  // r_a,i <= factor * r_a

  double rho_max() const noexcept;
  double r_a_max() const noexcept { return r_a_max_factor * r_a; }

  /// Human-readable violations of the parameter invariants; empty when valid.
  std::vector<std::string> violations() const;
};

/// Projections of every robot, in the order of the input states.
std::vector<TubeCoordinates> project_all(std::span<const RobotState> states, const VirtualTube& tube);

/// Robot whose projection is nearest to gamma(L); ties go to the lowest id.
RobotState front_robot(std::span<const RobotState> states, const VirtualTube& tube);
/// Robot whose projection is farthest from gamma(L); ties go to the lowest id.
RobotState last_robot(std::span<const RobotState> states, const VirtualTube& tube);

/// Integral of 2 lambda over [la, lb] by adaptive Simpson split at the width
/// breakpoints. Arguments outside [0, L] see the end widths.
double window_area(const VirtualTube& tube, double la, double lb, double tol = 1e-9);

/// Occupied area between the last and front robots, floored at the packing
/// minimum N (2 r_p)^2.
double swarm_area(std::span<const RobotState> states, const VirtualTube& tube, double physical_radius);
/// Same, from precomputed projection arc lengths.
double swarm_area_from_arc_lengths(std::span<const double> arc_lengths, const VirtualTube& tube,
                                   double physical_radius);

double swarm_density(std::span<const RobotState> states, const VirtualTube& tube, double physical_radius);

double average_forward_speed(std::span<const double> forward_speeds);

/// Throws std::invalid_argument for fewer than two robots.
double min_pairwise_distance(std::span<const RobotState> states);
double min_pairwise_distance(std::span<const double> xs, std::span<const double> ys);

}  // namespace tubeswarm
