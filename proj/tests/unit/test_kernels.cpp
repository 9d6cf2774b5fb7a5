#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tubeswarm/kernels.hpp"

using namespace tubeswarm;
namespace k = tubeswarm::kernels;

namespace {

struct Cloud {
  std::vector<double> xs, ys, radii;
};

Cloud random_cloud(std::mt19937_64& rng, std::size_t n, double extent) {
  std::uniform_real_distribution<double> pos(-extent, extent);
  std::uniform_real_distribution<double> rad(0.4, 1.6);
  Cloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.xs.push_back(pos(rng));
    c.ys.push_back(pos(rng));
    c.radii.push_back(rad(rng));
  }
  return c;
}

// Direct transcription of the pairwise repulsion sum.
Vec2 reference_repulsion(Vec2 p, double r, const Cloud& c, double r_s) {
  Vec2 sum{};
  for (std::size_t j = 0; j < c.xs.size(); ++j) {
    const Vec2 diff{p.x - c.xs[j], p.y - c.ys[j]};
    if (diff.x == 0.0 && diff.y == 0.0) continue;
    const double d = std::max(std::hypot(diff.x, diff.y), k::kMinSeparation);
    const double depth = 0.5 * (r + c.radii[j]) + r_s - d;
    if (depth > 0.0) sum += diff * (depth / d);
  }
  return sum;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar kernels match direct transcriptions") {
    std::mt19937_64 rng(21);
    for (std::size_t n : {2u, 3u, 7u, 20u, 33u}) {
      const Cloud c = random_cloud(rng, n, 3.0);
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p{c.xs[i], c.ys[i]};
        const Vec2 got = k::scalar::repulsion_sum(p, c.radii[i], c.xs, c.ys, c.radii, 0.4);
        const Vec2 want = reference_repulsion(p, c.radii[i], c, 0.4);
        CHECK(got.x == doctest::Approx(want.x).epsilon(1e-12));
        CHECK(got.y == doctest::Approx(want.y).epsilon(1e-12));
      }
      CHECK(std::sqrt(k::scalar::min_pair_distance_sq(c.xs, c.ys)) ==
            doctest::Approx(oracle::brute_min_distance(c.xs, c.ys)).epsilon(1e-14));
    }
  }

  TEST_CASE("coincident entries contribute nothing") {
    const std::vector<double> xs{1.0, 1.0}, ys{2.0, 2.0}, radii{0.8, 0.8};
    const Vec2 v = k::scalar::repulsion_sum({1.0, 2.0}, 0.8, xs, ys, radii, 0.4);
    CHECK(v == Vec2{0.0, 0.0});
  }

  TEST_CASE("vectorized kernels agree with the scalar reference") {
    if (!k::backend_available(k::Backend::kAvx2)) {
      MESSAGE("AVX2 not available on this machine; equivalence not exercised");
      CHECK(&k::table(k::Backend::kAvx2) == &k::table(k::Backend::kScalar));
      return;
    }
    const auto& scalar = k::table(k::Backend::kScalar);
    const auto& avx = k::table(k::Backend::kAvx2);
    CHECK(avx.backend == k::Backend::kAvx2);
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 400; ++trial) {
      const std::size_t n = 2 + static_cast<std::size_t>(trial % 45);
      const Cloud c = random_cloud(rng, n, trial % 3 == 0 ? 1.0 : 4.0);
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p{c.xs[i], c.ys[i]};
        const Vec2 a = scalar.repulsion_sum(p, c.radii[i], c.xs, c.ys, c.radii, 0.4);
        const Vec2 b = avx.repulsion_sum(p, c.radii[i], c.xs, c.ys, c.radii, 0.4);
        const double scale = 1.0 + norm(a);
        CHECK(std::abs(a.x - b.x) <= 1e-12 * scale);
        CHECK(std::abs(a.y - b.y) <= 1e-12 * scale);
      }
      const double sa = scalar.min_pair_distance_sq(c.xs, c.ys);
      const double sb = avx.min_pair_distance_sq(c.xs, c.ys);
      CHECK(std::abs(sa - sb) <= 1e-14 * (1.0 + sa));
    }
  }

  TEST_CASE("backend selection") {
    const auto before = k::active().backend;
    k::set_active_backend(k::Backend::kScalar);
    CHECK(k::active().backend == k::Backend::kScalar);
    k::set_active_backend(before);
    CHECK(k::backend_name(k::Backend::kScalar) == "scalar");
    CHECK(k::backend_name(k::Backend::kAvx2) == "avx2");
  }
}
