#include "tubeswarm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace tubeswarm::optim {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double inf_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct Correction {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

}  // namespace

LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double> x0, const LbfgsOptions& options) {
  const std::size_t n = x0.size();
  LbfgsResult result;
  result.x = std::move(x0);
  std::vector<double> grad(n);
  result.value = f(result.x, grad);
  result.evaluations = 1;
  if (!std::isfinite(result.value)) return result;

  std::deque<Correction> memory;
  std::vector<double> direction(n);
  std::vector<double> alpha(static_cast<std::size_t>(options.history));
  std::vector<double> trial(n);
  std::vector<double> trial_grad(n);
  int stalled = 0;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (inf_norm(grad) <= options.gradient_tolerance) {
      result.converged = true;
      break;
    }
    // Two-loop recursion.
    for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
    for (std::size_t k = memory.size(); k-- > 0;) {
      alpha[k] = memory[k].rho * dot(memory[k].s, direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] -= alpha[k] * memory[k].y[i];
    }
    if (!memory.empty()) {
      const auto& last = memory.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& d : direction) d *= gamma;
    } else {
      const double scale = 1.0 / std::max(1.0, inf_norm(grad));
      for (double& d : direction) d *= scale;
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const double beta = memory[k].rho * dot(memory[k].y, direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] += (alpha[k] - beta) * memory[k].s[i];
    }
    double slope = dot(grad, direction);
    if (!(slope < 0.0)) {
      memory.clear();
      const double scale = 1.0 / std::max(1.0, inf_norm(grad));
      for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i] * scale;
      slope = dot(grad, direction);
    }

    // Backtracking Armijo line search.
    double step = 1.0;
    double trial_value = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = result.x[i] + step * direction[i];
      trial_value = f(trial, trial_grad);
      ++result.evaluations;
      if (std::isfinite(trial_value) && trial_value <= result.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    result.iterations = iter + 1;
    if (!accepted) {
      if (memory.empty()) break;
      memory.clear();
      continue;
    }

    Correction c{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      c.s[i] = trial[i] - result.x[i];
      c.y[i] = trial_grad[i] - grad[i];
    }
    const double sy = dot(c.s, c.y);
    if (sy > 1e-14 * std::sqrt(dot(c.s, c.s) * dot(c.y, c.y))) {
      c.rho = 1.0 / sy;
      memory.push_back(std::move(c));
      if (memory.size() > static_cast<std::size_t>(options.history)) memory.pop_front();
    }
    const double decrease = result.value - trial_value;
    result.x.swap(trial);
    grad.swap(trial_grad);
    result.value = trial_value;
    if (decrease <= options.value_tolerance * std::max(1.0, std::abs(result.value))) {
      if (++stalled >= 3) {
        result.converged = true;
        break;
      }
    } else {
      stalled = 0;
    }
  }
  return result;
}

double max_violation(const ConstrainedProblem& problem, std::span<const double> x) {
  std::vector<double> g(problem.constraint_count());
  problem.constraints(x, g, nullptr);
  double worst = 0.0;
  for (double v : g) worst = std::max(worst, v);
  return worst;
}

AugmentedLagrangianResult solve_augmented_lagrangian(const ConstrainedProblem& problem, std::vector<double> x0,
                                                     const AugmentedLagrangianOptions& options) {
  const std::size_t n = problem.dimension();
  const std::size_t m = problem.constraint_count();
  AugmentedLagrangianResult result;
  result.x = std::move(x0);
  result.multipliers.assign(m, 0.0);
  double penalty = options.initial_penalty;

  std::vector<double> g(m);
  std::vector<JacobianEntry> jac;
  std::vector<double> scratch(n);

  const auto merit = [&](std::span<const double> x, std::span<double> grad) {
    const double f = problem.objective(x, grad);
    if (!std::isfinite(f)) return f;
    jac.clear();
    problem.constraints(x, g, &jac);
    double value = f;
    std::vector<double> weight(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double shifted = std::max(0.0, result.multipliers[i] + penalty * g[i]);
      value += (shifted * shifted - result.multipliers[i] * result.multipliers[i]) / (2.0 * penalty);
      weight[i] = shifted;
    }
    for (const auto& e : jac) grad[e.col] += weight[e.row] * e.value;
    return value;
  };

  double previous_violation = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < options.max_outer_iterations; ++outer) {
    LbfgsOptions inner = options.inner;
    inner.max_iterations =
        std::min(inner.max_iterations, std::max(1, options.max_total_inner_iterations - result.inner_iterations));
    LbfgsResult sub = minimize_lbfgs(merit, result.x, inner);
    result.inner_iterations += sub.iterations;
    result.outer_iterations = outer + 1;
    result.x = std::move(sub.x);

    problem.constraints(result.x, g, nullptr);
    double violation = 0.0;
    double complementarity = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      violation = std::max(violation, g[i]);
      complementarity = std::max(complementarity, std::abs(std::max(g[i], -result.multipliers[i] / penalty)));
      result.multipliers[i] = std::max(0.0, result.multipliers[i] + penalty * g[i]);
    }
    result.max_violation = violation;
    if (violation <= options.feasibility_tolerance && complementarity <= 10.0 * options.feasibility_tolerance &&
        sub.converged) {
      result.converged = true;
      break;
    }
    if (result.inner_iterations >= options.max_total_inner_iterations) break;
    if (violation > 0.25 * previous_violation) {
      penalty = std::min(penalty * options.penalty_growth, options.max_penalty);
    }
    previous_violation = violation;
  }
  result.objective = problem.objective(result.x, scratch);
  return result;
}

}  // namespace tubeswarm::optim
