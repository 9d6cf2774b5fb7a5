#pragma once

#include <array>
#include <vector>

#include "json.hpp"

namespace tubeswarm {

/// Cubic coefficients (c3, c2, c1, c0) of one segment, in the local
/// coordinate u = l - segment start.
using Cubic = std::array<double, 4>;

struct ProfileSample {
  double speed = 0.0;    // v_a*(l), m/s
  double density = 0.0;  // rho_a*(l), robots/m^2
};

/// Planned average forward speed and density as piecewise cubics over [0, L].
class PlanProfile {
 public:
  PlanProfile() = default;
  PlanProfile(std::vector<double> breaks, std::vector<Cubic> speed, std::vector<Cubic> density);

  /// Single-segment profile with constant speed and density.
  static PlanProfile constant(double length, double speed, double density);

  double length() const noexcept { return breaks_.empty() ? 0.0 : breaks_.back(); }
  std::size_t segment_count() const noexcept { return speed_.size(); }
  const std::vector<double>& breaks() const noexcept { return breaks_; }
  const std::vector<Cubic>& speed_coeffs() const noexcept { return speed_; }
  const std::vector<Cubic>& density_coeffs() const noexcept { return density_; }

  /// Values of the active segment; at a break the segment with larger l.
  /// Throws DomainError outside [0, L].
  ProfileSample evaluate(double l) const;
  /// d/dl of speed and density.
  ProfileSample derivatives(double l) const;

  /// Largest jump of either profile across the interior breaks.
  double continuity_gap() const noexcept;

 private:
  std::size_t locate(double l) const;

  std::vector<double> breaks_;
  std::vector<Cubic> speed_;
  std::vector<Cubic> density_;
};

double eval_cubic(const Cubic& c, double u) noexcept;
double eval_cubic_derivative(const Cubic& c, double u) noexcept;

nlohmann::json to_json(const PlanProfile& profile);
/// Accepts the profile object itself or a plan document wrapping it under
/// "profile". Throws ConfigError on malformed input.
PlanProfile plan_profile_from_json(const nlohmann::json& doc);

}  // namespace tubeswarm
