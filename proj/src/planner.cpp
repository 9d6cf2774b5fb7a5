#include "tubeswarm/planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "tubeswarm/errors.hpp"
#include "tubeswarm/optimizer.hpp"

namespace tubeswarm {

// ---------------------------------------------------------------------------
// Config

std::vector<std::string> PlannerConfig::violations() const {
  std::vector<std::string> out;
  if (collocation_count < 10) out.emplace_back("collocation_count must be at least 10");
  if (segment_count < 1) out.emplace_back("segment_count must be at least 1");
  if (delta_l && !(*delta_l > 0.0)) out.emplace_back("delta_l must be positive");
  if (rho_rate_limit && !(*rho_rate_limit > 0.0)) out.emplace_back("rho_rate_limit must be positive");
  if (!(tolerance > 0.0)) out.emplace_back("tolerance must be positive");
  if (max_iterations < 1) out.emplace_back("max_iterations must be at least 1");
  if (boundary_speed && !(*boundary_speed > 0.0)) out.emplace_back("boundary_speed must be positive");
  if (boundary_density && !(*boundary_density > 0.0)) out.emplace_back("boundary_density must be positive");
  return out;
}

double PlannerConfig::resolved_delta_l(double length) const {
  return delta_l.value_or(length / (static_cast<double>(segment_count) * collocation_count));
}

double PlannerConfig::resolved_rate_limit(const SwarmParams& params) const {
  return rho_rate_limit.value_or(max_density_rate(params.robot_count, params.v_max, params.r_a));
}

// ---------------------------------------------------------------------------
// Closed-form bounds

double max_density_rate(int robot_count, double v_max, double r_a) {
  if (robot_count < 1 || !(v_max > 0.0) || !(r_a > 0.0)) {
    throw DomainError("max_density_rate needs N >= 1, v_max > 0 and r_a > 0");
  }
  const double n = std::ceil(std::sqrt(static_cast<double>(robot_count)));
  return std::sqrt(2.0) * robot_count * v_max / (4.0 * n * n * n * r_a * r_a * r_a);
}

double max_density(double r_p) {
  if (!(r_p > 0.0)) throw DomainError("max_density needs r_p > 0");
  return 1.0 / (r_p * r_p);
}

// ---------------------------------------------------------------------------
// Predicted density

DensityPrediction predict_density(const VirtualTube& tube, int robot_count, double rho_now, double l,
                                  double delta_l) {
  if (!(rho_now > 0.0)) throw DomainError("predicted density needs a positive current density");
  if (robot_count < 1) throw DomainError("predicted density needs at least one robot");
  const double n = static_cast<double>(robot_count);
  const double target = n / rho_now;
  const auto& width = tube.width_profile();
  auto area = [&](double w) { return window_area(tube, l - 0.5 * w, l + 0.5 * w); };
  auto area_slope = [&](double w) { return tube.width_clamped(l - 0.5 * w) + tube.width_clamped(l + 0.5 * w); };

  // The half-width is bounded by its extreme samples everywhere (the tube is
  // extended past its ends with the end widths), which brackets the root.
  double lo = target / (2.0 * width.max_value());
  double hi = target / (2.0 * width.min_value());
  double w = std::clamp(target / (2.0 * tube.width_clamped(l)), lo, hi);
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
    const double residual = area(w) - target;
    if (residual == 0.0) break;
    if (residual > 0.0) {
      hi = w;
    } else {
      lo = w;
    }
    // Newton step when it stays inside the bracket, bisection otherwise.
    const double newton = w - residual / area_slope(w);
    const double next = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
    if (std::abs(next - w) <= 1e-15 * w) {
      w = next;
      break;
    }
    w = next;
  }

  const double a = l - 0.5 * w + delta_l;
  const double b = l + 0.5 * w + delta_l;
  const double shifted = window_area(tube, a, b);
  DensityPrediction out;
  out.window_length = w;
  out.value = n / shifted;
  const double dw_drho = (-n / (rho_now * rho_now)) / area_slope(w);
  const double dshifted_dw = tube.width_clamped(a) + tube.width_clamped(b);
  out.d_value_d_density = -n / (shifted * shifted) * dshifted_dw * dw_drho;
  return out;
}

double predicted_density(const VirtualTube& tube, int robot_count, double rho_now, double l, double delta_l) {
  return predict_density(tube, robot_count, rho_now, l, delta_l).value;
}

// ---------------------------------------------------------------------------
// Residual audit

std::string constraint_name(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kSpeedBounds:
      return "speed_bounds";
    case ConstraintKind::kTangentialAcceleration:
      return "tangential_acceleration";
    case ConstraintKind::kCurvatureSpeed:
      return "curvature_speed";
    case ConstraintKind::kDensityBounds:
      return "density_bounds";
    case ConstraintKind::kDensityRate:
      return "density_rate";
    case ConstraintKind::kPredictiveDensityRate:
      return "predictive_density_rate";
    case ConstraintKind::kContinuity:
      return "continuity";
  }
  return "unknown";
}

const ConstraintEntry& ConstraintReport::entry(ConstraintKind kind) const {
  for (const auto& e : entries) {
    if (e.kind == kind) return e;
  }
  throw std::out_of_range("constraint not in report: " + constraint_name(kind));
}

nlohmann::json to_json(const ConstraintReport& report) {
  nlohmann::json doc;
  doc["feasible"] = report.feasible;
  doc["tolerance"] = report.tolerance;
  doc["grid_points"] = report.grid_points;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"constraint", constraint_name(e.kind)},
                       {"max_residual", e.max_residual},
                       {"worst_arc_length", e.worst_arc_length},
                       {"pass", e.pass}});
  }
  doc["constraints"] = std::move(entries);
  return doc;
}

namespace {

constexpr std::array<ConstraintKind, 6> kPointwiseKinds = {
    ConstraintKind::kSpeedBounds,   ConstraintKind::kTangentialAcceleration, ConstraintKind::kCurvatureSpeed,
    ConstraintKind::kDensityBounds, ConstraintKind::kDensityRate,            ConstraintKind::kPredictiveDensityRate,
};

struct PointResiduals {
  std::array<double, 6> values{};  // indexed like kPointwiseKinds
};

struct ConstraintContext {
  const VirtualTube& tube;
  const SwarmParams& params;
  double rho_max;
  double rate_limit;
  double delta_l;
};

PointResiduals residuals_at(const ConstraintContext& ctx, double l, double v, double dv, double rho, double drho) {
  PointResiduals r;
  const auto& p = ctx.params;
  r.values[0] = std::max({0.0, p.v_min - v, v - p.v_max});
  r.values[1] = std::max(0.0, std::abs(dv * v) - p.a_v);
  r.values[2] = std::max(0.0, v - std::sqrt(p.a_n * ctx.tube.curvature_radius(l)));
  r.values[3] = std::max({0.0, kDensityFloor - rho, rho - ctx.rho_max});
  r.values[4] = std::max(0.0, std::abs(drho * v) - ctx.rate_limit);
  if (rho > 0.0) {
    const double rho_f = predicted_density(ctx.tube, p.robot_count, rho, l, ctx.delta_l);
    r.values[5] = std::max(0.0, std::abs((rho_f - rho) / ctx.delta_l * v) - ctx.rate_limit);
  } else {
    r.values[5] = std::numeric_limits<double>::infinity();
  }
  return r;
}

std::vector<double> uniform_grid(double length, std::size_t intervals) {
  std::vector<double> grid(intervals + 1);
  for (std::size_t j = 0; j <= intervals; ++j) {
    grid[j] = length * static_cast<double>(j) / static_cast<double>(intervals);
  }
  grid.back() = length;
  return grid;
}

std::size_t dense_intervals(const PlannerConfig& config) {
  return static_cast<std::size_t>(config.segment_count) * static_cast<std::size_t>(config.collocation_count) * 10;
}

}  // namespace

ConstraintReport validate_plan(const PlanProfile& profile, const VirtualTube& tube, const SwarmParams& params,
                               const PlannerConfig& config) {
  const double length = tube.total_length();
  const ConstraintContext ctx{tube, params, params.rho_max(), config.resolved_rate_limit(params),
                              config.resolved_delta_l(length)};
  ConstraintReport report;
  report.tolerance = config.tolerance;
  for (ConstraintKind kind : kPointwiseKinds) report.entries.push_back({kind});
  const auto grid = uniform_grid(length, dense_intervals(config));
  report.grid_points = grid.size();
  for (double l : grid) {
    const ProfileSample value = profile.evaluate(l);
    const ProfileSample slope = profile.derivatives(l);
    const PointResiduals r = residuals_at(ctx, l, value.speed, slope.speed, value.density, slope.density);
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      if (r.values[i] > report.entries[i].max_residual) {
        report.entries[i].max_residual = r.values[i];
        report.entries[i].worst_arc_length = l;
      }
    }
  }
  report.entries.push_back({ConstraintKind::kContinuity, profile.continuity_gap(), 0.0, true});
  for (auto& e : report.entries) {
    e.pass = e.max_residual <= config.tolerance;
    report.feasible = report.feasible && e.pass;
  }
  return report;
}

double plan_objective(const PlanProfile& profile, double rho_d, std::size_t intervals) {
  const auto grid = uniform_grid(profile.length(), intervals);
  double total = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const ProfileSample s = profile.evaluate(grid[j]);
    const double weight = (j == 0 || j + 1 == grid.size()) ? 0.5 : 1.0;
    const double e = s.density - rho_d;
    total += weight * (1.0 / s.speed + e * e);
  }
  return total * profile.length() / static_cast<double>(intervals);
}

std::string to_string(PlanStatus status) {
  switch (status) {
    case PlanStatus::kOptimal:
      return "optimal";
    case PlanStatus::kBestEffort:
      return "best_effort";
    case PlanStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

nlohmann::json to_json(const PlanResult& result) {
  nlohmann::json doc;
  doc["format"] = "tubeswarm.plan/1";
  doc["status"] = to_string(result.status);
  doc["objective"] = result.objective;
  doc["local_minimum_certified"] = result.local_minimum_certified;
  doc["iterations"] = result.iterations;
  doc["diagnostics"] = result.diagnostics;
  if (result.profile.segment_count() > 0) doc["profile"] = to_json(result.profile);
  doc["constraint_report"] = to_json(result.report);
  return doc;
}

// ---------------------------------------------------------------------------
// Collocation problem
//
// Each profile is a C1 cubic Hermite spline over the K + 1 knots; the
// decision vector holds knot values and slopes of both profiles except the
// fixed boundary values at l = 0:
//   [dv_0, drho_0, (v_k, dv_k, rho_k, drho_k) for k = 1..K]

namespace {

constexpr std::size_t kConstraintsPerPoint = 11;

struct Basis {
  std::size_t segment = 0;
  std::array<double, 4> value{};  // weights on (y0, m0, y1, m1)
  std::array<double, 4> slope{};
};

Basis hermite_basis(const std::vector<double>& knots, double l) {
  const std::size_t segments = knots.size() - 1;
  auto it = std::upper_bound(knots.begin(), knots.end(), l);
  std::size_t k = it == knots.begin() ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
  k = std::min(k, segments - 1);
  const double h = knots[k + 1] - knots[k];
  const double t = (l - knots[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  Basis b;
  b.segment = k;
  b.value = {2 * t3 - 3 * t2 + 1, h * (t3 - 2 * t2 + t), -2 * t3 + 3 * t2, h * (t3 - t2)};
  b.slope = {(6 * t2 - 6 * t) / h, 3 * t2 - 4 * t + 1, (-6 * t2 + 6 * t) / h, 3 * t2 - 2 * t};
  return b;
}

struct Knots {
  std::vector<double> v, dv, rho, drho;
};

class CollocationProblem final : public optim::ConstrainedProblem {
 public:
  CollocationProblem(const ConstraintContext& ctx, std::vector<double> knots, double v0, double rho0,
                     std::vector<double> objective_points, double margin)
      : ctx_(ctx), knots_(std::move(knots)), v0_(v0), rho0_(rho0), margin_(margin) {
    const std::size_t intervals = objective_points.size() - 1;
    const double spacing = ctx_.tube.total_length() / static_cast<double>(intervals);
    for (std::size_t j = 0; j < objective_points.size(); ++j) {
      const double weight = (j == 0 || j == intervals) ? 0.5 * spacing : spacing;
      objective_.push_back({objective_points[j], hermite_basis(knots_, objective_points[j]), weight});
    }
  }

  void add_constraint_point(double l) {
    const double limit = std::sqrt(ctx_.params.a_n * ctx_.tube.curvature_radius(l));
    points_.push_back({l, hermite_basis(knots_, l), limit});
  }

  std::size_t dimension() const override { return 2 + 4 * (knots_.size() - 1); }
  std::size_t constraint_count() const override { return kConstraintsPerPoint * points_.size(); }

  Knots unpack(std::span<const double> x) const {
    const std::size_t n = knots_.size();
    Knots k{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    k.v[0] = v0_;
    k.rho[0] = rho0_;
    k.dv[0] = x[0];
    k.drho[0] = x[1];
    for (std::size_t i = 1; i < n; ++i) {
      const std::size_t base = 2 + 4 * (i - 1);
      k.v[i] = x[base];
      k.dv[i] = x[base + 1];
      k.rho[i] = x[base + 2];
      k.drho[i] = x[base + 3];
    }
    return k;
  }

  std::vector<double> pack(const Knots& k) const {
    std::vector<double> x(dimension());
    x[0] = k.dv[0];
    x[1] = k.drho[0];
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      const std::size_t base = 2 + 4 * (i - 1);
      x[base] = k.v[i];
      x[base + 1] = k.dv[i];
      x[base + 2] = k.rho[i];
      x[base + 3] = k.drho[i];
    }
    return x;
  }

  PlanProfile to_profile(std::span<const double> x) const {
    const Knots k = unpack(x);
    std::vector<Cubic> speed;
    std::vector<Cubic> density;
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
      const double h = knots_[i + 1] - knots_[i];
      speed.push_back(hermite_to_cubic(k.v[i], k.dv[i], k.v[i + 1], k.dv[i + 1], h));
      density.push_back(hermite_to_cubic(k.rho[i], k.drho[i], k.rho[i + 1], k.drho[i + 1], h));
    }
    return PlanProfile(knots_, std::move(speed), std::move(density));
  }

  double objective(std::span<const double> x, std::span<double> grad) const override {
    std::fill(grad.begin(), grad.end(), 0.0);
    const Knots k = unpack(x);
    for (const auto& p : points_) {
      const Sample s = sample(k, p.basis);
      if (!(s.v > 0.05 * ctx_.params.v_min) || !(s.rho > 0.5 * kDensityFloor)) {
        return std::numeric_limits<double>::infinity();
      }
    }
    double total = 0.0;
    for (const auto& p : objective_) {
      const Sample s = sample(k, p.basis);
      if (!(s.v > 0.05 * ctx_.params.v_min) || !(s.rho > 0.5 * kDensityFloor)) {
        return std::numeric_limits<double>::infinity();
      }
      const double e = s.rho - ctx_.params.rho_d;
      total += p.weight * (1.0 / s.v + e * e);
      accumulate(grad, p.basis, p.weight * (-1.0 / (s.v * s.v)), 0.0, p.weight * 2.0 * e, 0.0);
    }
    return total;
  }

  void constraints(std::span<const double> x, std::span<double> g,
                   std::vector<optim::JacobianEntry>* jac) const override {
    const Knots k = unpack(x);
    const auto& prm = ctx_.params;
    const double a_rho = ctx_.rate_limit;
    const double dl = ctx_.delta_l;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto& p = points_[i];
      const Sample s = sample(k, p.basis);
      double* out = g.data() + kConstraintsPerPoint * i;
      DensityPrediction pred{};
      if (s.rho > 0.0) {
        pred = predict_density(ctx_.tube, prm.robot_count, s.rho, p.l, dl);
      } else {
        pred.value = s.rho;  // keeps the residual finite; the objective rejects such points
      }
      const double jump = (pred.value - s.rho) / dl;
      // The entry values are fixed, so the entry point gets no margin.
      const double m = p.l > 0.0 ? margin_ : 0.0;
      out[0] = prm.v_min - s.v + m;
      out[1] = s.v - prm.v_max + m;
      out[2] = s.v * s.dv - prm.a_v + m;
      out[3] = -s.v * s.dv - prm.a_v + m;
      out[4] = s.v - p.speed_limit + m;
      out[5] = kDensityFloor - s.rho + m;
      out[6] = s.rho - ctx_.rho_max + m;
      out[7] = s.drho * s.v - a_rho + m;
      out[8] = -s.drho * s.v - a_rho + m;
      out[9] = jump * s.v - a_rho + m;
      out[10] = -jump * s.v - a_rho + m;
      if (jac == nullptr) continue;
      const std::size_t row = kConstraintsPerPoint * i;
      const double djump = (pred.d_value_d_density - 1.0) / dl;
      // partials with respect to (v, dv, rho, drho)
      const std::array<std::array<double, 4>, kConstraintsPerPoint> partials = {{
          {-1.0, 0.0, 0.0, 0.0},
          {1.0, 0.0, 0.0, 0.0},
          {s.dv, s.v, 0.0, 0.0},
          {-s.dv, -s.v, 0.0, 0.0},
          {1.0, 0.0, 0.0, 0.0},
          {0.0, 0.0, -1.0, 0.0},
          {0.0, 0.0, 1.0, 0.0},
          {s.drho, 0.0, 0.0, s.v},
          {-s.drho, 0.0, 0.0, -s.v},
          {jump, 0.0, djump * s.v, 0.0},
          {-jump, 0.0, -djump * s.v, 0.0},
      }};
      for (std::size_t c = 0; c < kConstraintsPerPoint; ++c) {
        emit(*jac, row + c, p.basis, partials[c]);
      }
    }
  }

  std::size_t point_count() const noexcept { return points_.size(); }

 private:
  struct Sample {
    double v, dv, rho, drho;
  };
  struct ObjectivePoint {
    double l;
    Basis basis;
    double weight;
  };
  struct ConstraintPoint {
    double l;
    Basis basis;
    double speed_limit;
  };

  static Cubic hermite_to_cubic(double y0, double m0, double y1, double m1, double h) {
    const double c2 = (3.0 * (y1 - y0) / h - 2.0 * m0 - m1) / h;
    const double c3 = (2.0 * (y0 - y1) / h + m0 + m1) / (h * h);
    return {c3, c2, m0, y0};
  }

  Sample sample(const Knots& k, const Basis& b) const {
    const std::size_t i = b.segment;
    Sample s{};
    s.v = b.value[0] * k.v[i] + b.value[1] * k.dv[i] + b.value[2] * k.v[i + 1] + b.value[3] * k.dv[i + 1];
    s.dv = b.slope[0] * k.v[i] + b.slope[1] * k.dv[i] + b.slope[2] * k.v[i + 1] + b.slope[3] * k.dv[i + 1];
    s.rho = b.value[0] * k.rho[i] + b.value[1] * k.drho[i] + b.value[2] * k.rho[i + 1] + b.value[3] * k.drho[i + 1];
    s.drho =
        b.slope[0] * k.rho[i] + b.slope[1] * k.drho[i] + b.slope[2] * k.rho[i + 1] + b.slope[3] * k.drho[i + 1];
    return s;
  }

  // Decision-vector index of knot quantity q (0 = v, 1 = dv, 2 = rho,
  // 3 = drho) at knot i, or -1 for the fixed boundary values.
  static long index_of(std::size_t knot, int q) {
    if (knot == 0) {
      if (q == 1) return 0;
      if (q == 3) return 1;
      return -1;
    }
    return static_cast<long>(2 + 4 * (knot - 1) + static_cast<std::size_t>(q));
  }

  // Chain rule from (v, dv, rho, drho) at a point to the decision vector.
  template <class Sink>
  static void for_each_partial(const Basis& b, const std::array<double, 4>& d, Sink&& sink) {
    const std::size_t i = b.segment;
    // speed profile: v depends on value weights, dv on slope weights
    const std::array<double, 4> w_speed = {b.value[0] * d[0] + b.slope[0] * d[1], b.value[1] * d[0] + b.slope[1] * d[1],
                                           b.value[2] * d[0] + b.slope[2] * d[1], b.value[3] * d[0] + b.slope[3] * d[1]};
    const std::array<double, 4> w_density = {
        b.value[0] * d[2] + b.slope[0] * d[3], b.value[1] * d[2] + b.slope[1] * d[3],
        b.value[2] * d[2] + b.slope[2] * d[3], b.value[3] * d[2] + b.slope[3] * d[3]};
    const std::array<std::pair<std::size_t, int>, 4> slots = {{{i, 0}, {i, 1}, {i + 1, 0}, {i + 1, 1}}};
    for (std::size_t j = 0; j < 4; ++j) {
      const auto [knot, q] = slots[j];
      if (w_speed[j] != 0.0) {
        if (const long idx = index_of(knot, q); idx >= 0) sink(static_cast<std::size_t>(idx), w_speed[j]);
      }
      if (w_density[j] != 0.0) {
        if (const long idx = index_of(knot, q + 2); idx >= 0) sink(static_cast<std::size_t>(idx), w_density[j]);
      }
    }
  }

  static void accumulate(std::span<double> grad, const Basis& b, double dv, double ddv, double drho, double ddrho) {
    for_each_partial(b, {dv, ddv, drho, ddrho}, [&](std::size_t idx, double w) { grad[idx] += w; });
  }

  static void emit(std::vector<optim::JacobianEntry>& jac, std::size_t row, const Basis& b,
                   const std::array<double, 4>& d) {
    for_each_partial(b, d, [&](std::size_t idx, double w) { jac.push_back({row, idx, w}); });
  }

  const ConstraintContext& ctx_;
  std::vector<double> knots_;
  double v0_;
  double rho0_;
  double margin_;
  std::vector<ObjectivePoint> objective_;
  std::vector<ConstraintPoint> points_;
};

std::vector<std::string> boundary_violations(const ConstraintContext& ctx, double v0, double rho0) {
  std::vector<std::string> out;
  const auto& p = ctx.params;
  const double limit = std::sqrt(p.a_n * ctx.tube.curvature_radius(0.0));
  if (v0 < p.v_min || v0 > p.v_max) out.push_back(constraint_name(ConstraintKind::kSpeedBounds));
  if (v0 > limit) out.push_back(constraint_name(ConstraintKind::kCurvatureSpeed));
  if (rho0 < kDensityFloor || rho0 > ctx.rho_max) {
    out.push_back(constraint_name(ConstraintKind::kDensityBounds));
  } else {
    const double rho_f = predicted_density(ctx.tube, p.robot_count, rho0, 0.0, ctx.delta_l);
    if (std::abs((rho_f - rho0) / ctx.delta_l * v0) > ctx.rate_limit) {
      out.push_back(constraint_name(ConstraintKind::kPredictiveDensityRate));
    }
  }
  return out;
}

}  // namespace

PlanResult plan(const VirtualTube& tube, const SwarmParams& params, const PlannerConfig& config) {
  if (auto bad = config.violations(); !bad.empty()) {
    throw std::invalid_argument("invalid planner config: " + bad.front());
  }
  if (auto bad = params.violations(); !bad.empty()) {
    throw std::invalid_argument("invalid swarm params: " + bad.front());
  }
  const double length = tube.total_length();
  const ConstraintContext ctx{tube, params, params.rho_max(), config.resolved_rate_limit(params),
                              config.resolved_delta_l(length)};
  const double v0 = config.boundary_speed.value_or(params.v_min);
  const double rho0 = config.boundary_density.value_or(params.rho_d);

  PlanResult result;
  if (auto bad = boundary_violations(ctx, v0, rho0); !bad.empty()) {
    result.status = PlanStatus::kInfeasible;
    result.diagnostics.push_back("boundary conditions violate the planning constraints");
    result.diagnostics.insert(result.diagnostics.end(), bad.begin(), bad.end());
    return result;
  }

  const std::size_t segments = static_cast<std::size_t>(config.segment_count);
  const std::size_t intervals = segments * static_cast<std::size_t>(config.collocation_count);
  const auto knots = uniform_grid(length, segments);
  const auto colloc = uniform_grid(length, intervals);
  const double margin = 0.1 * config.tolerance;
  CollocationProblem problem(ctx, knots, v0, rho0, colloc, margin);
  for (double l : colloc) problem.add_constraint_point(l);

  // Initial guess: accelerate from v0 at the tangential limit, hold rho_d.
  Knots guess{std::vector<double>(knots.size()), std::vector<double>(knots.size(), 0.0),
              std::vector<double>(knots.size()), std::vector<double>(knots.size(), 0.0)};
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const double l = knots[i];
    const double reachable = std::sqrt(v0 * v0 + 2.0 * params.a_v * l);
    const double curve = std::sqrt(params.a_n * tube.curvature_radius(l));
    guess.v[i] = std::clamp(std::min({reachable, params.v_max, curve}), params.v_min, params.v_max);
    guess.rho[i] = std::clamp(params.rho_d, kDensityFloor, ctx.rho_max);
  }
  guess.v[0] = v0;
  guess.rho[0] = rho0;
  std::vector<double> x = problem.pack(guess);

  optim::AugmentedLagrangianOptions options;
  options.feasibility_tolerance = 0.05 * config.tolerance;
  options.max_total_inner_iterations = config.max_iterations;

  bool converged = false;
  const std::size_t dense = dense_intervals(config);
  const auto dense_grid = uniform_grid(length, dense);
  for (int round = 0; round < 6; ++round) {
    auto solved = optim::solve_augmented_lagrangian(problem, x, options);
    x = std::move(solved.x);
    result.iterations += solved.inner_iterations;
    converged = solved.converged;
    options.max_total_inner_iterations = std::max(1, config.max_iterations - result.iterations);

    // Add dense points that the collocation set missed.
    const PlanProfile profile = problem.to_profile(x);
    std::size_t added = 0;
    for (double l : dense_grid) {
      const ProfileSample value = profile.evaluate(l);
      const ProfileSample slope = profile.derivatives(l);
      const PointResiduals r = residuals_at(ctx, l, value.speed, slope.speed, value.density, slope.density);
      if (*std::max_element(r.values.begin(), r.values.end()) > 0.5 * config.tolerance) {
        problem.add_constraint_point(l);
        ++added;
      }
    }
    if (added == 0) break;
    result.diagnostics.push_back("refined constraint set with " + std::to_string(added) + " dense points");
    if (result.iterations >= config.max_iterations) break;
  }

  // Random-perturbation probe around the solution.
  std::mt19937_64 rng(config.probe_seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> scratch(problem.dimension());
  double best = problem.objective(x, scratch);
  bool certified = false;
  for (int attempt = 0; attempt < 3 && !certified; ++attempt) {
    certified = true;
    for (int probe = 0; probe < 20; ++probe) {
      std::vector<double> trial = x;
      for (double& t : trial) t += 1e-3 * unit(rng);
      const double value = problem.objective(trial, scratch);
      if (std::isfinite(value) && value < best - 1e-12 * std::abs(best) &&
          optim::max_violation(problem, trial) <= margin) {
        certified = false;
        auto solved = optim::solve_augmented_lagrangian(problem, trial, options);
        result.iterations += solved.inner_iterations;
        if (solved.max_violation <= options.feasibility_tolerance) {
          x = std::move(solved.x);
          best = problem.objective(x, scratch);
        }
        break;
      }
    }
  }

  result.profile = problem.to_profile(x);
  result.report = validate_plan(result.profile, tube, params, config);
  result.objective = plan_objective(result.profile, params.rho_d, dense);
  result.local_minimum_certified = certified;
  if (!converged) result.diagnostics.push_back("optimizer stopped before meeting its convergence test");
  if (!certified) result.diagnostics.push_back("perturbation probe kept finding descent directions");
  result.status = (result.report.feasible && converged) ? PlanStatus::kOptimal : PlanStatus::kBestEffort;
  if (!result.report.feasible) result.diagnostics.push_back("dense-grid audit found constraint violations");
  return result;
}

}  // namespace tubeswarm
