#pragma once

#include <limits>
#include <span>

#include "tubeswarm/plan_profile.hpp"
#include "tubeswarm/swarm.hpp"
#include "tubeswarm/tube.hpp"
#include "tubeswarm/vec2.hpp"

namespace tubeswarm {

/// Where the forward speed and the density reference come from: a planned
/// profile, or the constant-speed baseline with density tracking disabled.
class Guidance {
 public:
  static Guidance planned(const PlanProfile& profile) { return Guidance(&profile, 0.0); }
  static Guidance baseline(double forward_speed) { return Guidance(nullptr, forward_speed); }

  bool has_plan() const noexcept { return profile_ != nullptr; }
  const PlanProfile* profile() const noexcept { return profile_; }

  /// v_a*(l), or the baseline speed.
  double speed(double l) const;
  /// rho_a*(l), or +inf (never triggers expansion) for the baseline.
  double density(double l) const;

 private:
  Guidance(const PlanProfile* profile, double speed) : profile_(profile), speed_(speed) {}

  const PlanProfile* profile_;
  double speed_;
};

struct ControlCommand {
  Vec2 velocity{};                // saturated command
  double avoidance_radius_rate = 0.0;
  Vec2 forward{};                 // components before saturation
  Vec2 interaction{};
  Vec2 boundary{};
  bool degenerate = false;        // zero resultant replaced by v_min along the tangent
};

/// Rescales v onto [v_min, v_max] keeping its direction. Throws
/// DegenerateDirectionError when |v| < 1e-12.
Vec2 saturate(const Vec2& v, double v_min, double v_max);

Vec2 forward_velocity(const TubeCoordinates& coords, const Guidance& guidance);
Vec2 forward_velocity(const RobotState& robot, const VirtualTube& tube, const Guidance& guidance);

/// k_m * sum_j max(0, (r_a,i + r_a,j)/2 + r_s - d_ij) (p_i - p_j) / d_ij.
Vec2 interaction_velocity(const RobotState& robot, std::span<const RobotState> neighbors,
                          const SwarmParams& params);

/// Inward push once the lateral offset exceeds lambda(l) - r_a,i.
Vec2 boundary_velocity(const RobotState& robot, const TubeCoordinates& coords, const SwarmParams& params);
Vec2 boundary_velocity(const RobotState& robot, const VirtualTube& tube, const SwarmParams& params);

/// Zero below the reference density, k_ra (rho_r - rho*) above it.
double avoidance_radius_rate(double rho_r, double rho_star, double k_ra);

/// Sums the components, saturates, and falls back to v_min along the
/// tangent when the sum vanishes.
ControlCommand compose_command(const Vec2& forward, const Vec2& interaction, const Vec2& boundary,
                               const TubeCoordinates& coords, const SwarmParams& params);

/// Full per-robot command against a swarm snapshot. rho_r is the swarm
/// density broadcast to every robot.
ControlCommand velocity_command(const RobotState& robot, std::span<const RobotState> neighbors,
                                const VirtualTube& tube, const Guidance& guidance, const SwarmParams& params,
                                double rho_r = 0.0);

}  // namespace tubeswarm
