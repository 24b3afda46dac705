#pragma once

// Monotone first-order descent used by both the embedding fit and the
// per-axis-point solves. Each iteration takes a trial step along -grad and
// halves it until the Armijo condition holds, so every accepted iterate has
// a value no larger than the previous one.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mdsbiplot/error.hpp"
#include "mdsbiplot/numerics.hpp"

namespace mdsbiplot {

enum class StepRule {
  fixed,        // trial step is always DescentOptions::initial_step
  backtracking  // trial step from the Barzilai-Borwein estimate
};

struct DescentOptions {
  int max_iterations = 2000;
  double tolerance = 1e-8;           // relative decrease that counts as converged
  double gradient_tolerance = 0.0;   // stop once ||grad|| <= this
  double armijo = 1e-4;
  double initial_step = 1.0;
  int max_halvings = 80;
  StepRule step_rule = StepRule::backtracking;
};

struct DescentResult {
  Matrix x;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // value at the start and after each accepted step
};

// `fn(x, grad)` returns the objective at x and, when grad is non-null, writes
// the gradient into *grad.
template <class Fn>
DescentResult descend(Fn&& fn, Matrix x, const DescentOptions& opts) {
  if (opts.max_iterations < 1) {
    throw std::invalid_argument("descent: max_iterations must be >= 1");
  }
  if (!(opts.tolerance > 0.0)) {
    throw std::invalid_argument("descent: tolerance must be > 0");
  }
  DescentResult res;
  Matrix grad(x.rows(), x.cols());
  double value = fn(x, &grad);
  if (!std::isfinite(value) || !grad.allFinite()) {
    throw NumericalError("descent: non-finite objective at the initial point");
  }
  res.trace.push_back(value);

  Matrix prev_x;
  Matrix prev_grad;
  double step = opts.initial_step;
  if (opts.step_rule == StepRule::backtracking) {
    const double gn = grad.norm();
    step = gn > 0.0 ? opts.initial_step / std::max(1.0, gn) : opts.initial_step;
  }

  Matrix trial(x.rows(), x.cols());
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double gsq = grad.squaredNorm();
    if (gsq == 0.0 || std::sqrt(gsq) <= opts.gradient_tolerance) {
      res.converged = true;
      break;
    }
    if (opts.step_rule == StepRule::backtracking && it > 0) {
      const Matrix s = x - prev_x;
      const Matrix y = grad - prev_grad;
      const double sy = (s.array() * y.array()).sum();
      const double ss = s.squaredNorm();
      if (sy > 0.0 && std::isfinite(ss / sy)) {
        step = ss / sy;
      } else {
        step *= 2.0;
      }
      step = std::clamp(step, 1e-20, 1e20);
    } else if (opts.step_rule == StepRule::fixed) {
      step = opts.initial_step;
    }

    double t = step;
    double trial_value = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      trial = x - t * grad;
      trial_value = fn(trial, nullptr);
      if (std::isfinite(trial_value) && trial_value <= value - opts.armijo * t * gsq) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // no decrease representable along -grad: stationary to working precision
      res.converged = true;
      break;
    }

    prev_x = x;
    prev_grad = grad;
    x = trial;
    const double old_value = value;
    value = fn(x, &grad);
    if (!std::isfinite(value) || !grad.allFinite()) {
      throw NumericalError("descent: non-finite objective at iteration " +
                           std::to_string(it + 1));
    }
    res.iterations = it + 1;
    res.trace.push_back(value);
    if (opts.step_rule == StepRule::backtracking) step = t;

    const double decrease = old_value - value;
    if (value == 0.0 || decrease <= opts.tolerance * std::max(old_value, 1e-12)) {
      res.converged = true;
      break;
    }
  }
  res.x = std::move(x);
  res.value = value;
  res.gradient_norm = grad.norm();
  return res;
}

}  // namespace mdsbiplot
