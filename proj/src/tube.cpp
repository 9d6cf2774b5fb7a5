#include "tubeswarm/tube.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tubeswarm/errors.hpp"

namespace tubeswarm {

namespace {

constexpr double kJoinTolerance = 1e-9;

double clamp01(double s, double length) noexcept { return std::clamp(s, 0.0, length); }

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error([&] {
        std::string what = "invalid configuration";
        for (const auto& issue : issues) {
          what += "; " + issue.path + ": " + issue.message;
        }
        return what;
      }()),
      issues_(std::move(issues)) {}

ConfigError::ConfigError(std::string path, std::string message)
    : ConfigError(std::vector<ConfigIssue>{{std::move(path), std::move(message)}}) {}

// ---------------------------------------------------------------------------
// CenterSegment

Vec2 CenterSegment::point_at(double s) const noexcept {
  if (kind == SegmentKind::kStraight) {
    return start_point + s * start_tangent;
  }
  const double radius = 1.0 / signed_curvature;
  const Vec2 center = start_point + radius * perp(start_tangent);
  return center - radius * perp(tangent_at(s));
}

Vec2 CenterSegment::tangent_at(double s) const noexcept {
  if (kind == SegmentKind::kStraight) {
    return start_tangent;
  }
  return rotate(start_tangent, signed_curvature * s);
}

double CenterSegment::nearest_local(const Vec2& p) const noexcept {
  if (kind == SegmentKind::kStraight) {
    return clamp01(dot(p - start_point, start_tangent), length);
  }
  const double radius = 1.0 / signed_curvature;
  const Vec2 center = start_point + radius * perp(start_tangent);
  const Vec2 from_center = p - center;
  if (squared_norm(from_center) < 1e-24) {
    return 0.0;  // every point of the arc is equidistant
  }
  const Vec2 r0 = start_point - center;
  const double sweep = std::atan2(cross(r0, from_center), dot(r0, from_center));

  double best_s = 0.0;
  double best_d2 = squared_norm(p - point_at(0.0));
  auto consider = [&](double s) {
    s = clamp01(s, length);
    const double d2 = squared_norm(p - point_at(s));
    if (d2 < best_d2 || (d2 == best_d2 && s < best_s)) {
      best_d2 = d2;
      best_s = s;
    }
  };
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  consider(sweep / signed_curvature);
  consider((sweep + kTwoPi) / signed_curvature);
  consider((sweep - kTwoPi) / signed_curvature);
  consider(length);
  return best_s;
}

// ---------------------------------------------------------------------------
// WidthProfile

WidthProfile::WidthProfile(std::vector<double> arc_lengths, std::vector<double> half_widths)
    : arc_(std::move(arc_lengths)), width_(std::move(half_widths)) {
  if (arc_.size() != width_.size() || arc_.size() < 2) {
    throw std::invalid_argument("width profile needs at least two (arc_length, half_width) samples");
  }
  for (std::size_t i = 0; i < arc_.size(); ++i) {
    if (!std::isfinite(arc_[i]) || !std::isfinite(width_[i])) {
      throw std::invalid_argument("width profile samples must be finite");
    }
    if (!(width_[i] > 0.0)) {
      throw std::invalid_argument("half width must be positive at sample " + std::to_string(i));
    }
    if (i > 0 && !(arc_[i] > arc_[i - 1])) {
      throw std::invalid_argument("width profile arc lengths must be strictly increasing");
    }
  }
}

WidthProfile WidthProfile::constant(double length, double half_width) {
  return WidthProfile({0.0, length}, {half_width, half_width});
}

double WidthProfile::at(double l) const noexcept {
  if (l <= arc_.front()) return width_.front();
  if (l >= arc_.back()) return width_.back();
  const auto it = std::upper_bound(arc_.begin(), arc_.end(), l);
  const std::size_t hi = static_cast<std::size_t>(it - arc_.begin());
  const std::size_t lo = hi - 1;
  const double t = (l - arc_[lo]) / (arc_[hi] - arc_[lo]);
  return width_[lo] + t * (width_[hi] - width_[lo]);
}

double WidthProfile::slope_at(double l) const noexcept {
  if (l < arc_.front() || l >= arc_.back()) return 0.0;
  const auto it = std::upper_bound(arc_.begin(), arc_.end(), l);
  const std::size_t hi = static_cast<std::size_t>(it - arc_.begin());
  const std::size_t lo = hi - 1;
  return (width_[hi] - width_[lo]) / (arc_[hi] - arc_[lo]);
}

double WidthProfile::min_value() const noexcept { return *std::min_element(width_.begin(), width_.end()); }

double WidthProfile::max_value() const noexcept { return *std::max_element(width_.begin(), width_.end()); }

// ---------------------------------------------------------------------------
// TubeCoordinates

double TubeCoordinates::side_angle() const noexcept { return positive_side ? 0.0 : std::numbers::pi; }

// ---------------------------------------------------------------------------
// VirtualTube

VirtualTube::VirtualTube(std::vector<CenterSegment> segments, WidthProfile width)
    : segments_(std::move(segments)), width_(std::move(width)) {
  if (segments_.empty()) {
    throw std::invalid_argument("tube needs at least one center segment");
  }
  starts_.reserve(segments_.size());
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& seg = segments_[i];
    if (!(seg.length > 0.0) || !std::isfinite(seg.length)) {
      throw std::invalid_argument("segment " + std::to_string(i) + " must have positive length");
    }
    if (std::abs(norm(seg.start_tangent) - 1.0) > kJoinTolerance) {
      throw std::invalid_argument("segment " + std::to_string(i) + " start tangent is not unit length");
    }
    if (seg.kind == SegmentKind::kArc && !(std::abs(seg.signed_curvature) > 0.0)) {
      throw std::invalid_argument("arc segment " + std::to_string(i) + " needs nonzero curvature");
    }
    if (seg.kind == SegmentKind::kStraight && seg.signed_curvature != 0.0) {
      throw std::invalid_argument("straight segment " + std::to_string(i) + " must have zero curvature");
    }
    if (i > 0) {
      const auto& prev = segments_[i - 1];
      if (norm(prev.end_point() - seg.start_point) > kJoinTolerance ||
          norm(prev.end_tangent() - seg.start_tangent) > kJoinTolerance) {
        throw std::invalid_argument("segments " + std::to_string(i - 1) + " and " + std::to_string(i) +
                                    " do not join with tangent continuity");
      }
    }
    starts_.push_back(total_length_);
    total_length_ += seg.length;
  }
  const double tol = kJoinTolerance * std::max(1.0, total_length_);
  const auto arcs = width_.arc_lengths();
  if (arcs.empty() || std::abs(arcs.front()) > tol || std::abs(arcs.back() - total_length_) > tol) {
    throw std::invalid_argument("width profile must span exactly [0, L]");
  }
}

std::size_t VirtualTube::segment_index(double l) const noexcept {
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), l);
  if (it == starts_.begin()) return 0;
  return static_cast<std::size_t>(it - starts_.begin()) - 1;
}

double VirtualTube::checked(double l) const {
  const double tol = kJoinTolerance * std::max(1.0, total_length_);
  if (!(l >= -tol && l <= total_length_ + tol)) {
    throw DomainError("arc length " + std::to_string(l) + " outside [0, " + std::to_string(total_length_) + "]");
  }
  return std::clamp(l, 0.0, total_length_);
}

Vec2 VirtualTube::center(double l) const {
  l = checked(l);
  const std::size_t k = segment_index(l);
  return segments_[k].point_at(l - starts_[k]);
}

Vec2 VirtualTube::tangent(double l) const {
  l = checked(l);
  const std::size_t k = segment_index(l);
  return segments_[k].tangent_at(l - starts_[k]);
}

Vec2 VirtualTube::normal(double l) const { return perp(tangent(l)); }

Vec2 VirtualTube::point(double l, double side_angle, double radial_fraction) const {
  l = checked(l);
  if (!(radial_fraction >= 0.0 && radial_fraction <= 1.0)) {
    throw DomainError("radial fraction " + std::to_string(radial_fraction) + " outside [0, 1]");
  }
  const std::size_t k = segment_index(l);
  const auto& seg = segments_[k];
  const double s = l - starts_[k];
  return seg.point_at(s) + (radial_fraction * width_.at(l) * std::cos(side_angle)) * perp(seg.tangent_at(s));
}

TubeCoordinates VirtualTube::project(const Vec2& p) const {
  std::size_t best_k = 0;
  double best_s = 0.0;
  double best_d2 = 0.0;
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const double s = segments_[k].nearest_local(p);
    const double d2 = squared_norm(p - segments_[k].point_at(s));
    // Strict improvement only: ties keep the smaller arc length.
    if (k == 0 || d2 < best_d2 * (1.0 - 1e-14) - 1e-300) {
      best_k = k;
      best_s = s;
      best_d2 = d2;
    }
  }
  const auto& seg = segments_[best_k];
  TubeCoordinates c;
  c.arc_length = std::clamp(starts_[best_k] + best_s, 0.0, total_length_);
  c.tangent = seg.tangent_at(best_s);
  c.normal = perp(c.tangent);
  c.width = width_.at(c.arc_length);
  const std::size_t active = segment_index(c.arc_length);
  c.curvature_radius = segments_[active].kind == SegmentKind::kStraight
                           ? kStraightCurvatureRadius
                           : 1.0 / std::abs(segments_[active].signed_curvature);
  const Vec2 foot = seg.point_at(best_s);
  const Vec2 delta = p - foot;
  c.signed_offset = dot(delta, c.normal);
  c.positive_side = c.signed_offset >= 0.0;
  c.radial_fraction = std::abs(c.signed_offset) / c.width;
  constexpr double kBeyond = 1e-12;
  if (best_k == 0 && best_s == 0.0 && dot(delta, c.tangent) < -kBeyond) {
    c.out_of_tube = true;
  }
  if (best_k + 1 == segments_.size() && best_s == seg.length && dot(delta, c.tangent) > kBeyond) {
    c.out_of_tube = true;
  }
  return c;
}

double VirtualTube::curvature_radius(double l) const {
  l = checked(l);
  const auto& seg = segments_[segment_index(l)];
  if (seg.kind == SegmentKind::kStraight) return kStraightCurvatureRadius;
  return 1.0 / std::abs(seg.signed_curvature);
}

double VirtualTube::width(double l) const { return width_.at(checked(l)); }

double VirtualTube::arc_length_between(double la, double lb) const { return std::abs(checked(lb) - checked(la)); }

bool VirtualTube::contains(const Vec2& p, double margin) const {
  const TubeCoordinates c = project(p);
  if (c.out_of_tube) return false;
  const double offset = c.radial_fraction * c.width;
  return offset <= c.width - margin + 1e-12 * (1.0 + c.width);
}

std::vector<double> VirtualTube::breakpoints() const {
  std::vector<double> points(starts_.begin(), starts_.end());
  for (double a : width_.arc_lengths()) {
    points.push_back(std::clamp(a, 0.0, total_length_));
  }
  points.push_back(total_length_);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

// ---------------------------------------------------------------------------
// TubeBuilder

TubeBuilder::TubeBuilder(Vec2 start, Vec2 tangent) : point_(start), tangent_(normalized(tangent)) {}

TubeBuilder& TubeBuilder::straight(double length) {
  CenterSegment seg{SegmentKind::kStraight, point_, tangent_, length, 0.0};
  point_ = seg.end_point();
  segments_.push_back(seg);
  length_ += length;
  return *this;
}

TubeBuilder& TubeBuilder::arc(double length, double signed_curvature) {
  CenterSegment seg{SegmentKind::kArc, point_, tangent_, length, signed_curvature};
  point_ = seg.end_point();
  tangent_ = seg.end_tangent();
  segments_.push_back(seg);
  length_ += length;
  return *this;
}

VirtualTube TubeBuilder::build(WidthProfile width) const { return VirtualTube(segments_, std::move(width)); }

}  // namespace tubeswarm
