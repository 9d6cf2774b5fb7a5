#pragma once

// Pairwise swarm kernels over structure-of-arrays robot data. Every kernel
// has a scalar reference implementation; vectorized variants are selected
// at runtime and must agree with the reference to rounding.

#include <span>
#include <string_view>

#include "tubeswarm/vec2.hpp"

namespace tubeswarm::kernels {

enum class Backend { kScalar, kAvx2 };

/// Sum over j of max(0, (r_i + r_j)/2 + r_s - d_ij) * (p_i - p_j) / d_ij,
/// with d_ij floored at kMinSeparation. Entries coincident with p_i
/// contribute zero, so the robot itself may be part of the arrays.
inline constexpr double kMinSeparation = 1e-6;

using RepulsionFn = Vec2 (*)(Vec2 p, double radius, std::span<const double> xs, std::span<const double> ys,
                             std::span<const double> radii, double safety_radius);
using MinDistanceSqFn = double (*)(std::span<const double> xs, std::span<const double> ys);

struct KernelTable {
  Backend backend;
  RepulsionFn repulsion_sum;
  MinDistanceSqFn min_pair_distance_sq;
};

namespace scalar {
Vec2 repulsion_sum(Vec2 p, double radius, std::span<const double> xs, std::span<const double> ys,
                   std::span<const double> radii, double safety_radius);
double min_pair_distance_sq(std::span<const double> xs, std::span<const double> ys);
}  // namespace scalar

#if defined(TUBESWARM_HAVE_AVX2)
namespace avx2 {
Vec2 repulsion_sum(Vec2 p, double radius, std::span<const double> xs, std::span<const double> ys,
                   std::span<const double> radii, double safety_radius);
double min_pair_distance_sq(std::span<const double> xs, std::span<const double> ys);
}  // namespace avx2
#endif

/// True when the backend is compiled in and the CPU supports it.
bool backend_available(Backend backend) noexcept;

/// Table for the given backend; falls back to scalar when unavailable.
const KernelTable& table(Backend backend) noexcept;

/// Table used by the library. Chosen once from the CPU features, unless the
/// TUBESWARM_SIMD environment variable is set to "scalar" or "avx2".
const KernelTable& active() noexcept;

/// Overrides the runtime choice (tests, benchmarks).
void set_active_backend(Backend backend) noexcept;

std::string_view backend_name(Backend backend) noexcept;

}  // namespace tubeswarm::kernels
