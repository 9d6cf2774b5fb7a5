#include "tubeswarm/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tubeswarm/kernels.hpp"
#include "tubeswarm/quadrature.hpp"

namespace tubeswarm {

double SwarmParams::rho_max() const noexcept { return rho_max_override.value_or(1.0 / (r_p * r_p)); }

std::vector<std::string> SwarmParams::violations() const {
  std::vector<std::string> out;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + " must be positive and finite");
  };
  if (robot_count < 1) out.emplace_back("robot_count must be at least 1");
  positive(v_min, "v_min");
  positive(v_max, "v_max");
  positive(a_v, "a_v");
  positive(a_n, "a_n");
  positive(r_p, "r_p");
  positive(r_s, "r_s");
  positive(r_a, "r_a");
  positive(rho_d, "rho_d");
  positive(k_ra, "k_ra");
  positive(k_m, "k_m");
  positive(k_xy, "k_xy");
  if (v_min > v_max) out.emplace_back("v_min must not exceed v_max");
  if (!(r_p <= r_s && r_s <= r_a)) out.emplace_back("radii must satisfy r_p <= r_s <= r_a");
  if (rho_max_override) positive(*rho_max_override, "rho_max");
  if (rho_d > rho_max()) out.emplace_back("rho_d must not exceed rho_max");
  if (!(r_a_max_factor >= 1.0)) out.emplace_back("r_a_max_factor must be at least 1");
  return out;
}

std::vector<TubeCoordinates> project_all(std::span<const RobotState> states, const VirtualTube& tube) {
  std::vector<TubeCoordinates> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(tube.project(s.position));
  return out;
}

namespace {

// Index of the robot with the extreme projected arc length; ties -> lowest id.
std::size_t extreme_index(std::span<const RobotState> states, const VirtualTube& tube, bool front) {
  if (states.empty()) throw std::invalid_argument("swarm is empty");
  std::size_t best = 0;
  double best_l = tube.project(states[0].position).arc_length;
  for (std::size_t i = 1; i < states.size(); ++i) {
    const double l = tube.project(states[i].position).arc_length;
    const bool better = front ? l > best_l : l < best_l;
    if (better || (l == best_l && states[i].id < states[best].id)) {
      best = i;
      best_l = l;
    }
  }
  return best;
}

}  // namespace

RobotState front_robot(std::span<const RobotState> states, const VirtualTube& tube) {
  return states[extreme_index(states, tube, true)];
}

RobotState last_robot(std::span<const RobotState> states, const VirtualTube& tube) {
  return states[extreme_index(states, tube, false)];
}

double window_area(const VirtualTube& tube, double la, double lb, double tol) {
  const auto breaks = tube.width_profile().arc_lengths();
  return piecewise_simpson([&tube](double l) { return 2.0 * tube.width_clamped(l); }, la, lb, breaks, tol);
}

double swarm_area_from_arc_lengths(std::span<const double> arc_lengths, const VirtualTube& tube,
                                   double physical_radius) {
  if (arc_lengths.empty()) throw std::invalid_argument("swarm is empty");
  const auto [lo, hi] = std::minmax_element(arc_lengths.begin(), arc_lengths.end());
  const double floor_area = static_cast<double>(arc_lengths.size()) * 4.0 * physical_radius * physical_radius;
  return std::max(window_area(tube, *lo, *hi), floor_area);
}

double swarm_area(std::span<const RobotState> states, const VirtualTube& tube, double physical_radius) {
  std::vector<double> ls;
  ls.reserve(states.size());
  for (const auto& s : states) ls.push_back(tube.project(s.position).arc_length);
  return swarm_area_from_arc_lengths(ls, tube, physical_radius);
}

double swarm_density(std::span<const RobotState> states, const VirtualTube& tube, double physical_radius) {
  return static_cast<double>(states.size()) / swarm_area(states, tube, physical_radius);
}

double average_forward_speed(std::span<const double> forward_speeds) {
  if (forward_speeds.empty()) throw std::invalid_argument("no forward speeds to average");
  return std::accumulate(forward_speeds.begin(), forward_speeds.end(), 0.0) /
         static_cast<double>(forward_speeds.size());
}

double min_pairwise_distance(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() < 2) throw std::invalid_argument("minimum pairwise distance needs at least two robots");
  return std::sqrt(kernels::active().min_pair_distance_sq(xs, ys));
}

double min_pairwise_distance(std::span<const RobotState> states) {
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(states.size());
  ys.reserve(states.size());
  for (const auto& s : states) {
    xs.push_back(s.position.x);
    ys.push_back(s.position.y);
  }
  return min_pairwise_distance(xs, ys);
}

}  // namespace tubeswarm
