#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "tubeswarm/kernels.hpp"

namespace tubeswarm::kernels::avx2 {

namespace {

inline double hsum(__m256d v) noexcept {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

inline double hmin(__m256d v) noexcept {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_min_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_min_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

Vec2 repulsion_sum(Vec2 p, double radius, std::span<const double> xs, std::span<const double> ys,
                   std::span<const double> radii, double safety_radius) {
  const std::size_t n = xs.size();
  const __m256d px = _mm256_set1_pd(p.x);
  const __m256d py = _mm256_set1_pd(p.y);
  const __m256d reach = _mm256_set1_pd(0.5 * radius + safety_radius);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d floor = _mm256_set1_pd(kMinSeparation);
  const __m256d zero = _mm256_setzero_pd();
  __m256d sx = zero;
  __m256d sy = zero;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(px, _mm256_loadu_pd(xs.data() + j));
    const __m256d dy = _mm256_sub_pd(py, _mm256_loadu_pd(ys.data() + j));
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    const __m256d d = _mm256_max_pd(_mm256_sqrt_pd(d2), floor);
    const __m256d limit = _mm256_add_pd(reach, _mm256_mul_pd(half, _mm256_loadu_pd(radii.data() + j)));
    const __m256d penetration = _mm256_max_pd(zero, _mm256_sub_pd(limit, d));
    const __m256d w = _mm256_div_pd(penetration, d);
    sx = _mm256_add_pd(sx, _mm256_mul_pd(w, dx));
    sy = _mm256_add_pd(sy, _mm256_mul_pd(w, dy));
  }
  double tx = hsum(sx);
  double ty = hsum(sy);
  for (; j < n; ++j) {
    const double dx = p.x - xs[j];
    const double dy = p.y - ys[j];
    const double d = std::max(std::sqrt(dx * dx + dy * dy), kMinSeparation);
    const double penetration = std::max(0.0, 0.5 * (radius + radii[j]) + safety_radius - d);
    const double w = penetration / d;
    tx += w * dx;
    ty += w * dy;
  }
  return {tx, ty};
}

double min_pair_distance_sq(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const __m256d xi = _mm256_set1_pd(xs[i]);
    const __m256d yi = _mm256_set1_pd(ys[i]);
    __m256d lane_best = _mm256_set1_pd(best);
    std::size_t j = i + 1;
    for (; j + 4 <= n; j += 4) {
      const __m256d dx = _mm256_sub_pd(xi, _mm256_loadu_pd(xs.data() + j));
      const __m256d dy = _mm256_sub_pd(yi, _mm256_loadu_pd(ys.data() + j));
      lane_best = _mm256_min_pd(lane_best, _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
    }
    best = hmin(lane_best);
    for (; j < n; ++j) {
      const double dx = xs[i] - xs[j];
      const double dy = ys[i] - ys[j];
      best = std::min(best, dx * dx + dy * dy);
    }
  }
  return best;
}

}  // namespace tubeswarm::kernels::avx2
