#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tubeswarm/plan_profile.hpp"
#include "tubeswarm/swarm.hpp"
#include "tubeswarm/tube.hpp"

namespace tubeswarm {

/// Lower bound standing in for the strict positivity of the planned density.
inline constexpr double kDensityFloor = 1e-4;

struct PlannerConfig {
  int collocation_count = 20;  // M, points per segment
  int segment_count = 10;      // K
  std::optional<double> delta_l;         // defaults to L / (K M)
  std::optional<double> rho_rate_limit;  // defaults to max_density_rate(N, v_max, r_a)
  double tolerance = 1e-6;
  int max_iterations = 20000;            // total quasi-Newton iterations
  std::optional<double> boundary_speed;    // v_a(0), defaults to v_min
  std::optional<double> boundary_density;  // rho_a(0), defaults to rho_d
  std::uint64_t probe_seed = 0;

  std::vector<std::string> violations() const;

  double resolved_delta_l(double length) const;
  double resolved_rate_limit(const SwarmParams& params) const;
};

/// Magnitude of the fastest possible density change of N robots expanding
/// from a packed square at speed v_max: sqrt(2) N v_max / (4 n^3 r_a^3),
/// n = ceil(sqrt(N)).
double max_density_rate(int robot_count, double v_max, double r_a);

/// Packing limit 1 / r_p^2.
double max_density(double r_p);

struct DensityPrediction {
  double value = 0.0;            // rho_f(l + delta_l)
  double d_value_d_density = 0.0;
  double window_length = 0.0;    // occupancy window reconstructed at l
};

/// Density after a rigid shift of delta_l along the tube, starting from a
/// swarm of N robots centered at l with density rho_now.
double predicted_density(const VirtualTube& tube, int robot_count, double rho_now, double l, double delta_l);
DensityPrediction predict_density(const VirtualTube& tube, int robot_count, double rho_now, double l,
                                  double delta_l);

enum class ConstraintKind {
  kSpeedBounds,
  kTangentialAcceleration,
  kCurvatureSpeed,
  kDensityBounds,
  kDensityRate,
  kPredictiveDensityRate,
  kContinuity,
};

std::string constraint_name(ConstraintKind kind);

struct ConstraintEntry {
  ConstraintKind kind;
  double max_residual = 0.0;     // >= 0, zero when satisfied everywhere
  double worst_arc_length = 0.0;
  bool pass = true;
};

struct ConstraintReport {
  std::vector<ConstraintEntry> entries;
  double tolerance = 0.0;
  std::size_t grid_points = 0;
  bool feasible = true;

  const ConstraintEntry& entry(ConstraintKind kind) const;
};

nlohmann::json to_json(const ConstraintReport& report);

/// Residual audit of every planning constraint on a grid ten times denser
/// than the collocation grid.
ConstraintReport validate_plan(const PlanProfile& profile, const VirtualTube& tube, const SwarmParams& params,
                               const PlannerConfig& config);

/// Trapezoid discretization of  integral 1/v dl + integral (rho - rho_d)^2 dl
/// on `intervals` uniform intervals.
double plan_objective(const PlanProfile& profile, double rho_d, std::size_t intervals);

enum class PlanStatus { kOptimal, kBestEffort, kInfeasible };

std::string to_string(PlanStatus status);

struct PlanResult {
  PlanStatus status = PlanStatus::kInfeasible;
  PlanProfile profile;
  ConstraintReport report;
  double objective = 0.0;
  bool local_minimum_certified = false;
  int iterations = 0;
  std::vector<std::string> diagnostics;
};

nlohmann::json to_json(const PlanResult& result);

PlanResult plan(const VirtualTube& tube, const SwarmParams& params, const PlannerConfig& config);

}  // namespace tubeswarm
