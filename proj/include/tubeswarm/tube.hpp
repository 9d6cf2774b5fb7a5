#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tubeswarm/vec2.hpp"

namespace tubeswarm {

/// Curvature radius reported for straight segments.
inline constexpr double kStraightCurvatureRadius = 1e9;

enum class SegmentKind { kStraight, kArc };

/// One piece of the center curve: a straight line or a circular arc, both
/// parameterized by arc length measured from the segment start.
struct CenterSegment {
  SegmentKind kind = SegmentKind::kStraight;
  Vec2 start_point{};
  Vec2 start_tangent{1.0, 0.0};
  double length = 0.0;
  double signed_curvature = 0.0;  // 1/m, positive turns left

  Vec2 point_at(double s) const noexcept;
  Vec2 tangent_at(double s) const noexcept;
  Vec2 end_point() const noexcept { return point_at(length); }
  Vec2 end_tangent() const noexcept { return tangent_at(length); }

  /// Local arc length of the nearest point on this segment, clamped to
  /// [0, length].
  double nearest_local(const Vec2& p) const noexcept;
};

/// Half-width lambda(l) stored as piecewise-linear samples.
class WidthProfile {
 public:
  WidthProfile() = default;
  WidthProfile(std::vector<double> arc_lengths, std::vector<double> half_widths);

  static WidthProfile constant(double length, double half_width);

  /// Linear interpolation; arguments outside the sample range take the
  /// nearest end value.
  double at(double l) const noexcept;
  /// d lambda / dl of the piece containing l (right piece at breakpoints).
  double slope_at(double l) const noexcept;

  double min_value() const noexcept;
  double max_value() const noexcept;

  std::span<const double> arc_lengths() const noexcept { return arc_; }
  std::span<const double> half_widths() const noexcept { return width_; }

 private:
  std::vector<double> arc_;
  std::vector<double> width_;
};

/// Local frame and tube coordinates of a point relative to the tube.
struct TubeCoordinates {
  double arc_length = 0.0;
  bool positive_side = true;     // theta = 0 (+n side) when true, theta = pi otherwise
  double radial_fraction = 0.0;  // rho = |offset| / lambda(l)
  Vec2 tangent{1.0, 0.0};
  Vec2 normal{0.0, 1.0};
  double width = 0.0;
  double curvature_radius = kStraightCurvatureRadius;
  double signed_offset = 0.0;    // along n(l), meters
  bool out_of_tube = false;      // foot of the perpendicular lies beyond [0, L]

  double side_angle() const noexcept;
};

/// Planar virtual tube: a C1 chain of straight and circular-arc center
/// segments plus a continuous positive half-width profile. Immutable after
/// construction.
class VirtualTube {
 public:
  VirtualTube(std::vector<CenterSegment> segments, WidthProfile width);

  double total_length() const noexcept { return total_length_; }
  std::span<const CenterSegment> segments() const noexcept { return segments_; }
  const WidthProfile& width_profile() const noexcept { return width_; }
  /// Arc length at which each segment starts.
  std::span<const double> segment_starts() const noexcept { return starts_; }

  Vec2 center(double l) const;
  Vec2 tangent(double l) const;
  Vec2 normal(double l) const;

  /// gamma(l) + rho * lambda(l) * n(l) * cos(theta).
  Vec2 point(double l, double side_angle, double radial_fraction) const;

  TubeCoordinates project(const Vec2& p) const;

  double curvature_radius(double l) const;
  double width(double l) const;
  /// Width lookup that extends the tube past its ends with the end widths.
  double width_clamped(double l) const noexcept { return width_.at(l); }
  double arc_length_between(double la, double lb) const;

  /// True iff the point's offset is within lambda(l) - margin and the
  /// projection falls inside [0, L]. The boundary itself counts as inside.
  bool contains(const Vec2& p, double margin) const;

  /// Breakpoints of lambda and of the segment chain, sorted, inside [0, L].
  std::vector<double> breakpoints() const;

 private:
  std::size_t segment_index(double l) const noexcept;
  double checked(double l) const;

  std::vector<CenterSegment> segments_;
  std::vector<double> starts_;
  WidthProfile width_;
  double total_length_ = 0.0;
};

/// Chains segments with position and tangent continuity.
class TubeBuilder {
 public:
  TubeBuilder(Vec2 start, Vec2 tangent);

  TubeBuilder& straight(double length);
  TubeBuilder& arc(double length, double signed_curvature);

  double length() const noexcept { return length_; }
  VirtualTube build(WidthProfile width) const;

 private:
  std::vector<CenterSegment> segments_;
  Vec2 point_;
  Vec2 tangent_;
  double length_ = 0.0;
};

}  // namespace tubeswarm
