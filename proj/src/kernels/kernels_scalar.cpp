#include <algorithm>
#include <cmath>
#include <limits>

#include "tubeswarm/kernels.hpp"

namespace tubeswarm::kernels::scalar {

Vec2 repulsion_sum(Vec2 p, double radius, std::span<const double> xs, std::span<const double> ys,
                   std::span<const double> radii, double safety_radius) {
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double dx = p.x - xs[j];
    const double dy = p.y - ys[j];
    const double d = std::max(std::sqrt(dx * dx + dy * dy), kMinSeparation);
    const double penetration = std::max(0.0, 0.5 * (radius + radii[j]) + safety_radius - d);
    const double w = penetration / d;
    sx += w * dx;
    sy += w * dy;
  }
  return {sx, sy};
}

double min_pair_distance_sq(std::span<const double> xs, std::span<const double> ys) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const double dx = xs[i] - xs[j];
      const double dy = ys[i] - ys[j];
      best = std::min(best, dx * dx + dy * dy);
    }
  }
  return best;
}

}  // namespace tubeswarm::kernels::scalar
