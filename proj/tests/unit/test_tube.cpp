#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tubeswarm/errors.hpp"
#include "tubeswarm/tube.hpp"

using namespace tubeswarm;
using doctest::Approx;

namespace {

VirtualTube straight_tube(double length, double half_width) {
  return TubeBuilder({0.0, 0.0}, {1.0, 0.0}).straight(length).build(WidthProfile::constant(length, half_width));
}

// Quarter circle of radius 10 about the origin, starting at (10, 0) heading +y.
VirtualTube quarter_arc(double half_width) {
  const double length = 10.0 * std::numbers::pi / 2.0;
  return TubeBuilder({10.0, 0.0}, {0.0, 1.0}).arc(length, 0.1).build(WidthProfile::constant(length, half_width));
}

VirtualTube mixed_tube() {
  return TubeBuilder({1.0, -2.0}, {std::cos(0.3), std::sin(0.3)})
      .straight(8.0)
      .arc(12.0, 1.0 / 15.0)
      .straight(5.0)
      .arc(9.0, -1.0 / 12.0)
      .build(WidthProfile({0.0, 10.0, 20.0, 34.0}, {3.0, 3.0, 1.5, 2.0}));
}

}  // namespace

TEST_SUITE("tube") {
  TEST_CASE("straight tube point and projection") {
    const auto tube = straight_tube(10.0, 2.0);
    const Vec2 p = tube.point(3.0, 0.0, 0.5);
    CHECK(p.x == Approx(3.0));
    CHECK(p.y == Approx(1.0));

    const auto c = tube.project({3.0, 1.0});
    CHECK(c.arc_length == Approx(3.0));
    CHECK(c.positive_side);
    CHECK(c.side_angle() == 0.0);
    CHECK(c.radial_fraction == Approx(0.5));
    CHECK_FALSE(c.out_of_tube);

    const auto below = tube.project({3.0, -1.0});
    CHECK_FALSE(below.positive_side);
    CHECK(below.side_angle() == Approx(std::numbers::pi));
    CHECK(below.signed_offset == Approx(-1.0));

    const auto on_center = tube.project(tube.center(5.0));
    CHECK(on_center.arc_length == Approx(5.0));
    CHECK(on_center.radial_fraction == Approx(0.0));
  }

  TEST_CASE("zero radial fraction lands on the center curve") {
    const auto tube = mixed_tube();
    for (double l : {0.0, 3.0, 8.0, 14.5, 26.0, 33.9}) {
      for (double theta : {0.0, std::numbers::pi}) {
        const Vec2 p = tube.point(l, theta, 0.0);
        const Vec2 g = tube.center(l);
        CHECK(p.x == Approx(g.x).epsilon(1e-12));
        CHECK(p.y == Approx(g.y).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("quarter arc point at full offset") {
    const auto tube = quarter_arc(1.0);
    const double l = 10.0 * std::numbers::pi / 2.0;
    const Vec2 g = tube.center(l);
    CHECK(g.x == Approx(0.0).epsilon(1e-12));
    CHECK(g.y == Approx(10.0));
    const Vec2 p = tube.point(l, 0.0, 1.0);
    // Distance 1 from the center curve along the normal, which points at
    // the arc center for a left turn.
    CHECK(norm(p - g) == Approx(1.0));
    CHECK(norm(p) == Approx(9.0));
  }

  TEST_CASE("arc center curve matches numeric arc length") {
    const auto tube = quarter_arc(1.0);
    const int n = 100000;
    double length = 0.0;
    Vec2 prev = tube.center(0.0);
    for (int i = 1; i <= n; ++i) {
      const Vec2 next = tube.center(tube.total_length() * i / n);
      length += norm(next - prev);
      prev = next;
    }
    CHECK(std::abs(length - tube.total_length()) / tube.total_length() < 1e-6);
  }

  TEST_CASE("mixed chain center curve matches numeric arc length") {
    const auto tube = mixed_tube();
    const int n = 100000;
    double length = 0.0;
    Vec2 prev = tube.center(0.0);
    for (int i = 1; i <= n; ++i) {
      const Vec2 next = tube.center(tube.total_length() * i / n);
      length += norm(next - prev);
      prev = next;
    }
    CHECK(std::abs(length - tube.total_length()) / tube.total_length() < 1e-6);
  }

  TEST_CASE("projection onto an arc from inside") {
    const auto tube = quarter_arc(2.0);
    const double angle = std::numbers::pi / 4.0;
    const auto c = tube.project({9.0 * std::cos(angle), 9.0 * std::sin(angle)});
    CHECK(c.arc_length == Approx(10.0 * std::numbers::pi / 4.0));
    CHECK(c.positive_side);
    CHECK(c.signed_offset == Approx(1.0));
    CHECK(c.radial_fraction == Approx(0.5));

    // Cross-check by dense sampling of candidate arc lengths.
    double best_l = 0.0;
    double best_d = 1e300;
    for (int i = 0; i <= 200000; ++i) {
      const double l = tube.total_length() * i / 200000.0;
      const double d = norm(tube.center(l) - Vec2{9.0 * std::cos(angle), 9.0 * std::sin(angle)});
      if (d < best_d) {
        best_d = d;
        best_l = l;
      }
    }
    CHECK(c.arc_length == Approx(best_l).epsilon(1e-4));
  }

  TEST_CASE("curvature radius") {
    const auto arc = TubeBuilder({0.0, 0.0}, {1.0, 0.0})
                         .straight(5.0)
                         .arc(3.0, 0.1)
                         .build(WidthProfile::constant(8.0, 1.0));
    CHECK(arc.curvature_radius(2.0) == kStraightCurvatureRadius);
    CHECK(arc.curvature_radius(6.0) == Approx(10.0));
    // The joint belongs to the segment with larger l.
    CHECK(arc.curvature_radius(5.0) == Approx(10.0));
    CHECK_THROWS_AS(arc.curvature_radius(8.5), DomainError);
  }

  TEST_CASE("width and arc length") {
    const auto tube =
        TubeBuilder({0.0, 0.0}, {1.0, 0.0}).straight(40.0).build(WidthProfile({0.0, 40.0}, {5.0, 1.0}));
    CHECK(tube.width(10.0) == Approx(4.0));
    CHECK(tube.arc_length_between(7.0, 7.0) == 0.0);
    CHECK(tube.arc_length_between(4.0, 10.0) == Approx(6.0));
    CHECK(tube.arc_length_between(10.0, 4.0) == Approx(6.0));
    CHECK_THROWS_AS(tube.width(-0.5), DomainError);
  }

  TEST_CASE("contains uses a closed boundary") {
    const auto tube = straight_tube(10.0, 2.0);
    CHECK(tube.contains(tube.center(4.0), 0.0));
    CHECK(tube.contains({4.0, 2.0}, 0.0));
    CHECK(tube.contains({4.0, -2.0}, 0.0));
    CHECK_FALSE(tube.contains({4.0, 1.8}, 0.3));
    CHECK_FALSE(tube.contains({4.0, 2.01}, 0.0));
  }

  TEST_CASE("points beyond the ends are clamped and flagged") {
    const auto tube = straight_tube(10.0, 2.0);
    const auto before = tube.project({-1.0, 0.5});
    CHECK(before.arc_length == 0.0);
    CHECK(before.out_of_tube);
    const auto after = tube.project({12.0, 0.0});
    CHECK(after.arc_length == Approx(10.0));
    CHECK(after.out_of_tube);
    CHECK_FALSE(tube.contains({12.0, 0.0}, 0.0));
  }

  TEST_CASE("frame is orthonormal and arc length is additive") {
    const auto tube = mixed_tube();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, tube.total_length());
    for (int i = 0; i < 1000; ++i) {
      const double l = u(rng);
      const Vec2 t = tube.tangent(l);
      const Vec2 n = tube.normal(l);
      CHECK(std::abs(norm(t) - 1.0) <= 1e-12);
      CHECK(std::abs(norm(n) - 1.0) <= 1e-12);
      CHECK(std::abs(dot(t, n)) <= 1e-12);
    }
    for (int i = 0; i < 200; ++i) {
      double a = u(rng), b = u(rng), c = u(rng);
      if (a > b) std::swap(a, b);
      if (b > c) std::swap(b, c);
      if (a > b) std::swap(a, b);
      CHECK(tube.arc_length_between(a, b) + tube.arc_length_between(b, c) ==
            Approx(tube.arc_length_between(a, c)).epsilon(1e-12));
    }
  }

  TEST_CASE("segments join with continuous position and tangent") {
    const auto tube = mixed_tube();
    const auto segments = tube.segments();
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
      CHECK(norm(segments[i].end_point() - segments[i + 1].start_point) < 1e-12);
      CHECK(norm(segments[i].end_tangent() - segments[i + 1].start_tangent) < 1e-12);
    }
  }

  TEST_CASE("invalid construction is rejected") {
    CHECK_THROWS(WidthProfile({0.0, 10.0}, {2.0, -1.0}));
    CHECK_THROWS(WidthProfile({0.0, 10.0}, {2.0}));
    CHECK_THROWS(WidthProfile({5.0, 1.0}, {2.0, 2.0}));
    CHECK_THROWS(TubeBuilder({0.0, 0.0}, {1.0, 0.0}).straight(-1.0).build(WidthProfile::constant(1.0, 1.0)));
    CHECK_THROWS(TubeBuilder({0.0, 0.0}, {1.0, 0.0}).straight(10.0).build(WidthProfile::constant(8.0, 1.0)));
  }
}
