#include "tubeswarm/plan_profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tubeswarm/errors.hpp"

namespace tubeswarm {

double eval_cubic(const Cubic& c, double u) noexcept { return ((c[0] * u + c[1]) * u + c[2]) * u + c[3]; }

double eval_cubic_derivative(const Cubic& c, double u) noexcept { return (3.0 * c[0] * u + 2.0 * c[1]) * u + c[2]; }

PlanProfile::PlanProfile(std::vector<double> breaks, std::vector<Cubic> speed, std::vector<Cubic> density)
    : breaks_(std::move(breaks)), speed_(std::move(speed)), density_(std::move(density)) {
  if (speed_.empty() || breaks_.size() != speed_.size() + 1 || density_.size() != speed_.size()) {
    throw std::invalid_argument("plan profile needs K >= 1 segments and K + 1 breaks");
  }
  if (breaks_.front() != 0.0) throw std::invalid_argument("plan profile must start at l = 0");
  for (std::size_t i = 1; i < breaks_.size(); ++i) {
    if (!(breaks_[i] > breaks_[i - 1])) throw std::invalid_argument("plan breaks must be strictly increasing");
  }
}

PlanProfile PlanProfile::constant(double length, double speed, double density) {
  return PlanProfile({0.0, length}, {Cubic{0.0, 0.0, 0.0, speed}}, {Cubic{0.0, 0.0, 0.0, density}});
}

std::size_t PlanProfile::locate(double l) const {
  const double tol = 1e-9 * std::max(1.0, length());
  if (breaks_.empty() || !(l >= -tol && l <= length() + tol)) {
    throw DomainError("plan evaluated at l = " + std::to_string(l) + " outside [0, " + std::to_string(length()) +
                      "]");
  }
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), l);
  if (it == breaks_.begin()) return 0;
  return std::min(static_cast<std::size_t>(it - breaks_.begin()) - 1, speed_.size() - 1);
}

ProfileSample PlanProfile::evaluate(double l) const {
  const std::size_t k = locate(l);
  const double u = std::clamp(l, 0.0, length()) - breaks_[k];
  return {eval_cubic(speed_[k], u), eval_cubic(density_[k], u)};
}

ProfileSample PlanProfile::derivatives(double l) const {
  const std::size_t k = locate(l);
  const double u = std::clamp(l, 0.0, length()) - breaks_[k];
  return {eval_cubic_derivative(speed_[k], u), eval_cubic_derivative(density_[k], u)};
}

double PlanProfile::continuity_gap() const noexcept {
  double gap = 0.0;
  for (std::size_t k = 0; k + 1 < speed_.size(); ++k) {
    const double h = breaks_[k + 1] - breaks_[k];
    gap = std::max(gap, std::abs(eval_cubic(speed_[k], h) - eval_cubic(speed_[k + 1], 0.0)));
    gap = std::max(gap, std::abs(eval_cubic(density_[k], h) - eval_cubic(density_[k + 1], 0.0)));
  }
  return gap;
}

nlohmann::json to_json(const PlanProfile& profile) {
  nlohmann::json doc;
  doc["format"] = "tubeswarm.plan-profile/1";
  doc["coefficient_origin"] = "segment_start";
  doc["segment_breaks"] = profile.breaks();
  doc["speed_coeffs"] = profile.speed_coeffs();
  doc["density_coeffs"] = profile.density_coeffs();
  return doc;
}

PlanProfile plan_profile_from_json(const nlohmann::json& doc) {
  const nlohmann::json& body = doc.contains("profile") ? doc.at("profile") : doc;
  try {
    if (body.contains("coefficient_origin") && body.at("coefficient_origin") != "segment_start") {
      throw ConfigError("coefficient_origin", "only \"segment_start\" is supported");
    }
    auto breaks = body.at("segment_breaks").get<std::vector<double>>();
    auto speed = body.at("speed_coeffs").get<std::vector<Cubic>>();
    auto density = body.at("density_coeffs").get<std::vector<Cubic>>();
    return PlanProfile(std::move(breaks), std::move(speed), std::move(density));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("profile", e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("profile", e.what());
  }
}

}  // namespace tubeswarm
