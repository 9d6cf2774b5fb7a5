#pragma once

// Smooth nonlinear programming used by the planner: limited-memory BFGS for
// unconstrained problems and a Powell-Hestenes-Rockafellar augmented
// Lagrangian wrapper for inequality constraints g(x) <= 0.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tubeswarm::optim {

/// Returns f(x) and writes the gradient into grad. May return +inf to
/// reject a trial point.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  int max_iterations = 400;
  int history = 12;
  double gradient_tolerance = 1e-10;  // on the infinity norm
  double value_tolerance = 1e-15;     // relative decrease that counts as stalled
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double> x0, const LbfgsOptions& options = {});

struct JacobianEntry {
  std::size_t row;
  std::size_t col;
  double value;
};

class ConstrainedProblem {
 public:
  virtual ~ConstrainedProblem() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::size_t constraint_count() const = 0;
  /// grad has dimension() entries.
  virtual double objective(std::span<const double> x, std::span<double> grad) const = 0;
  /// Fills g (constraint_count() entries, feasible when <= 0). When jac is
  /// non-null, appends the nonzero partial derivatives.
  virtual void constraints(std::span<const double> x, std::span<double> g, std::vector<JacobianEntry>* jac) const = 0;
};

struct AugmentedLagrangianOptions {
  int max_outer_iterations = 60;
  int max_total_inner_iterations = 20000;
  double feasibility_tolerance = 1e-9;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double max_penalty = 1e10;
  LbfgsOptions inner{};
};

struct AugmentedLagrangianResult {
  std::vector<double> x;
  std::vector<double> multipliers;
  double objective = 0.0;
  double max_violation = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
};

AugmentedLagrangianResult solve_augmented_lagrangian(const ConstrainedProblem& problem, std::vector<double> x0,
                                                     const AugmentedLagrangianOptions& options = {});

/// max over i of max(0, g_i(x)).
double max_violation(const ConstrainedProblem& problem, std::span<const double> x);

}  // namespace tubeswarm::optim
