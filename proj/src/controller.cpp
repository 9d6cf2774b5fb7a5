#include "tubeswarm/controller.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tubeswarm/errors.hpp"
#include "tubeswarm/kernels.hpp"

namespace tubeswarm {

double Guidance::speed(double l) const {
  if (profile_ == nullptr) return speed_;
  return profile_->evaluate(std::clamp(l, 0.0, profile_->length())).speed;
}

double Guidance::density(double l) const {
  if (profile_ == nullptr) return std::numeric_limits<double>::infinity();
  return profile_->evaluate(std::clamp(l, 0.0, profile_->length())).density;
}

Vec2 saturate(const Vec2& v, double v_min, double v_max) {
  const double n = norm(v);
  if (n < 1e-12) throw DegenerateDirectionError("cannot saturate a zero-length velocity");
  if (n < v_min) return v * (v_min / n);
  if (n > v_max) return v * (v_max / n);
  return v;
}

Vec2 forward_velocity(const TubeCoordinates& coords, const Guidance& guidance) {
  return guidance.speed(coords.arc_length) * coords.tangent;
}

Vec2 forward_velocity(const RobotState& robot, const VirtualTube& tube, const Guidance& guidance) {
  return forward_velocity(tube.project(robot.position), guidance);
}

Vec2 interaction_velocity(const RobotState& robot, std::span<const RobotState> neighbors,
                          const SwarmParams& params) {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> radii;
  xs.reserve(neighbors.size());
  ys.reserve(neighbors.size());
  radii.reserve(neighbors.size());
  for (const auto& n : neighbors) {
    if (n.id == robot.id) continue;
    xs.push_back(n.position.x);
    ys.push_back(n.position.y);
    radii.push_back(n.avoidance_radius);
  }
  const Vec2 sum = kernels::active().repulsion_sum(robot.position, robot.avoidance_radius, xs, ys, radii, params.r_s);
  return params.k_m * sum;
}

Vec2 boundary_velocity(const RobotState& robot, const TubeCoordinates& coords, const SwarmParams& params) {
  const double offset = coords.radial_fraction * coords.width;
  if (offset == 0.0) return {};
  // lambda - r_s - (r_a,i - r_s): the safety band widens with the avoidance radius.
  const double threshold = coords.width - params.r_s - (robot.avoidance_radius - params.r_s);
  const double excess = offset - threshold;
  if (excess <= 0.0) return {};
  const double outward = coords.positive_side ? 1.0 : -1.0;
  return (-params.k_xy * excess * outward) * coords.normal;
}

Vec2 boundary_velocity(const RobotState& robot, const VirtualTube& tube, const SwarmParams& params) {
  return boundary_velocity(robot, tube.project(robot.position), params);
}

double avoidance_radius_rate(double rho_r, double rho_star, double k_ra) {
  if (rho_r <= rho_star) return 0.0;
  return k_ra * (rho_r - rho_star);
}

ControlCommand compose_command(const Vec2& forward, const Vec2& interaction, const Vec2& boundary,
                               const TubeCoordinates& coords, const SwarmParams& params) {
  ControlCommand cmd;
  cmd.forward = forward;
  cmd.interaction = interaction;
  cmd.boundary = boundary;
  const Vec2 total = forward + interaction + boundary;
  if (norm(total) < 1e-12) {
    cmd.velocity = params.v_min * coords.tangent;
    cmd.degenerate = true;
  } else {
    cmd.velocity = saturate(total, params.v_min, params.v_max);
  }
  return cmd;
}

ControlCommand velocity_command(const RobotState& robot, std::span<const RobotState> neighbors,
                                const VirtualTube& tube, const Guidance& guidance, const SwarmParams& params,
                                double rho_r) {
  const TubeCoordinates coords = tube.project(robot.position);
  ControlCommand cmd = compose_command(forward_velocity(coords, guidance), interaction_velocity(robot, neighbors, params),
                                       boundary_velocity(robot, coords, params), coords, params);
  if (guidance.has_plan()) {
    cmd.avoidance_radius_rate = avoidance_radius_rate(rho_r, guidance.density(coords.arc_length), params.k_ra);
  }
  return cmd;
}

}  // namespace tubeswarm
