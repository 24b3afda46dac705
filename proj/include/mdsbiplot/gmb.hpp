#pragma once

// Generalized MDS biplot axes.
//
// With the embedding Z_hat held fixed, every point a_{k,l} = l * e_k on the
// k-th HD attribute axis is mapped to the LD point b minimizing
//
//   g(b) = sum_i (delta_HD(x_i, a_{k,l}) - delta_LD(z_i, b))^2 .
//
// Sweeping l over a uniform grid and connecting the minimizers gives the LD
// axis of attribute k. The mean of g over the grid, G(k), ranks how badly an
// attribute fits the projection and drives axis pruning.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "mdsbiplot/descent.hpp"
#include "mdsbiplot/dissimilarity.hpp"
#include "mdsbiplot/mds.hpp"
#include "mdsbiplot/parallel.hpp"
#include "mdsbiplot/scene.hpp"

namespace mdsbiplot {

struct AxisKinds {
  Dissimilarity hd = Dissimilarity::euclidean;
  Dissimilarity ld = Dissimilarity::euclidean;
};

struct AxisSolveOptions {
  int max_iterations = 5000;
  double gradient_tolerance = 1e-10;
  int restarts = 0;  // extra seeded random starts per point
  std::uint64_t seed = 0;
};

/// l * e_k in R^p (k zero-based).
inline Vector axis_point(Eigen::Index k, double ell, Eigen::Index p) {
  if (k < 0 || k >= p) {
    throw std::invalid_argument("axis_point: attribute index " + std::to_string(k) +
                                " out of range for p=" + std::to_string(p));
  }
  Vector a = Vector::Zero(p);
  a(k) = ell;
  return a;
}

/// delta_HD(x_i, a) for every observation.
inline Vector hd_targets(const Matrix& x_rows, Dissimilarity kind_hd, const Vector& a) {
  Vector t(x_rows.rows());
  for (Eigen::Index i = 0; i < x_rows.rows(); ++i) t(i) = delta(kind_hd, x_rows.row(i), a);
  return t;
}

namespace detail {

inline double axis_objective(const Matrix& z_hat, const Vector& targets,
                             Dissimilarity kind_ld, const Matrix& b, Matrix* grad) {
  double total = 0.0;
  if (grad) grad->setZero(b.rows(), 1);
  for (Eigen::Index i = 0; i < z_hat.rows(); ++i) {
    const double r = targets(i) - delta(kind_ld, z_hat.row(i), b.col(0));
    total += r * r;
    if (grad && r != 0.0) {
      *grad += (-2.0 * r) * grad_delta_y_clamped(kind_ld, z_hat.row(i), b.col(0));
    }
  }
  return total;
}

inline DescentResult solve_targets(const Matrix& z_hat, const Vector& targets,
                                   Dissimilarity kind_ld, const Vector& init,
                                   const AxisSolveOptions& opts) {
  DescentOptions dopts;
  dopts.max_iterations = opts.max_iterations;
  dopts.gradient_tolerance = opts.gradient_tolerance;
  // stop on the gradient test or a failed line search only
  dopts.tolerance = std::numeric_limits<double>::min();
  auto fn = [&](const Matrix& b, Matrix* grad) {
    return axis_objective(z_hat, targets, kind_ld, b, grad);
  };
  return descend(fn, Matrix(init), dopts);
}

inline DescentResult solve_with_restarts(const Matrix& z_hat, const Vector& targets,
                                         Dissimilarity kind_ld, const Vector& init,
                                         const AxisSolveOptions& opts,
                                         std::uint64_t point_seed) {
  DescentResult best = solve_targets(z_hat, targets, kind_ld, init, opts);
  if (opts.restarts <= 0) return best;
  double radius = 0.0;
  for (Eigen::Index i = 0; i < z_hat.rows(); ++i) radius = std::max(radius, z_hat.row(i).norm());
  radius = radius > 0.0 ? 2.0 * radius : 1.0;
  std::mt19937_64 rng(point_seed);
  std::uniform_real_distribution<double> unif(-radius, radius);
  for (int r = 0; r < opts.restarts; ++r) {
    Vector start(z_hat.cols());
    for (Eigen::Index j = 0; j < start.size(); ++j) start(j) = unif(rng);
    DescentResult cand = solve_targets(z_hat, targets, kind_ld, start, opts);
    if (cand.value < best.value) best = std::move(cand);
  }
  return best;
}

// Starting points for a standalone solve: every embedded observation, and for
// m <= 3 the best node of a coarse lattice over [-r, r]^m, r = 2 max ||z_i||.
inline std::vector<Vector> candidate_starts(const Matrix& z_hat, const Vector& targets,
                                            Dissimilarity kind_ld) {
  std::vector<Vector> starts;
  for (Eigen::Index i = 0; i < z_hat.rows(); ++i) starts.push_back(z_hat.row(i).transpose());
  const Eigen::Index m = z_hat.cols();
  if (m > 3) return starts;
  double radius = 0.0;
  for (Eigen::Index i = 0; i < z_hat.rows(); ++i) radius = std::max(radius, z_hat.row(i).norm());
  radius = radius > 0.0 ? 2.0 * radius : 1.0;
  const int per_dim = 41;
  long total = 1;
  for (Eigen::Index j = 0; j < m; ++j) total *= per_dim;
  Matrix node(m, 1);
  Vector best;
  double best_value = std::numeric_limits<double>::infinity();
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    for (Eigen::Index j = 0; j < m; ++j) {
      node(j, 0) = -radius + 2.0 * radius * static_cast<double>(rest % per_dim) / (per_dim - 1);
      rest /= per_dim;
    }
    const double v = axis_objective(z_hat, targets, kind_ld, node, nullptr);
    if (v < best_value) {
      best_value = v;
      best = node.col(0);
    }
  }
  if (best.size() == m) starts.push_back(best);
  return starts;
}

inline void check_axis_inputs(const Matrix& x_rows, const Matrix& z_hat) {
  if (x_rows.rows() != z_hat.rows()) {
    throw std::invalid_argument("axis: X and Z_hat row counts differ");
  }
  require_nonempty(z_hat, "axis");
  require_finite(z_hat, "axis");
}

// Grid values that are valid axis positions for kind_hd. Cosine only sees
// the direction of a_{k,l}: it is undefined at l = 0 and constant for l > 0,
// so the axis collapses to the single point traced over the positive half.
// Clark is only defined for nonnegative points, so l < 0 is dropped.
inline std::vector<double> traced_values(const AxisGrid& grid, Dissimilarity kind_hd) {
  const bool positive = kind_hd == Dissimilarity::cosine;
  const bool nonnegative = requires_nonnegative_inputs(kind_hd);
  if (!positive && !nonnegative) return grid.values;
  std::vector<double> out;
  for (double v : grid.values) {
    if (v > 0.0 || (nonnegative && v == 0.0)) out.push_back(v);
  }
  if (out.empty()) {
    throw std::invalid_argument(to_string(kind_hd) + " axes need a grid with positive values");
  }
  return out;
}

}  // namespace detail

/// Global minimizer of the per-point stress for HD axis point `a`. Descends
/// from `init` and from each candidate start, keeping the lowest value (the
/// run from `init` wins ties). Tracing uses plain warm-started descent instead.
inline Vector solve_axis_point(const Matrix& x_rows, const Matrix& z_hat, AxisKinds kinds,
                               const Vector& a, const Vector& init,
                               const AxisSolveOptions& opts = {}) {
  detail::check_axis_inputs(x_rows, z_hat);
  if (init.size() != z_hat.cols() || !init.allFinite()) {
    throw std::invalid_argument("solve_axis_point: init must be a finite m-vector");
  }
  const Vector targets = hd_targets(x_rows, kinds.hd, a);
  DescentResult best = detail::solve_with_restarts(z_hat, targets, kinds.ld, init, opts, opts.seed);
  for (const Vector& start : detail::candidate_starts(z_hat, targets, kinds.ld)) {
    DescentResult cand = detail::solve_targets(z_hat, targets, kinds.ld, start, opts);
    if (cand.value < best.value) best = std::move(cand);
  }
  return best.x.col(0);
}

/// g(b): stress between the HD axis point and the fixed observations.
inline double point_stress(const Vector& b, const Vector& a, const Matrix& x_rows,
                           const Matrix& z_hat, AxisKinds kinds) {
  detail::check_axis_inputs(x_rows, z_hat);
  double total = 0.0;
  for (Eigen::Index i = 0; i < x_rows.rows(); ++i) {
    const double r = delta(kinds.hd, x_rows.row(i), a) - delta(kinds.ld, z_hat.row(i), b);
    total += r * r;
  }
  return total;
}

/// G(k): plain mean of g over the traced grid.
inline double axis_avg_stress(const AxisTrace& trace) {
  if (trace.point_stress.empty()) {
    throw std::invalid_argument("axis_avg_stress: empty trace");
  }
  double sum = 0.0;
  for (double g : trace.point_stress) sum += g;
  return sum / static_cast<double>(trace.point_stress.size());
}

/// Solve every grid point of attribute k in ascending order; the first point
/// starts at the origin and each later one at its predecessor's solution.
inline AxisTrace trace_axis(Eigen::Index k, const AxisGrid& grid, const Matrix& x_rows,
                            const Matrix& z_hat, AxisKinds kinds,
                            const AxisSolveOptions& opts = {}) {
  detail::check_axis_inputs(x_rows, z_hat);
  const Eigen::Index p = x_rows.cols();
  AxisTrace trace;
  trace.attribute = k;
  trace.ell = detail::traced_values(grid, kinds.hd);
  Vector current = Vector::Zero(z_hat.cols());
  for (std::size_t idx = 0; idx < trace.ell.size(); ++idx) {
    const Vector a = axis_point(k, trace.ell[idx], p);
    const Vector targets = hd_targets(x_rows, kinds.hd, a);
    const std::uint64_t point_seed =
        opts.seed + 1000003ULL * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(idx);
    DescentResult res =
        detail::solve_with_restarts(z_hat, targets, kinds.ld, current, opts, point_seed);
    current = res.x.col(0);
    trace.points.push_back(current);
    trace.point_stress.push_back(res.value);
  }
  trace.avg_stress = axis_avg_stress(trace);
  return trace;
}

/// Trace every attribute. Axes are independent given the fixed embedding, so
/// they are split over `threads` workers; the output does not depend on it.
inline std::vector<AxisTrace> trace_all_axes(const AxisGrid& grid, const Matrix& x_rows,
                                             const Matrix& z_hat, AxisKinds kinds,
                                             const AxisSolveOptions& opts = {},
                                             unsigned threads = 1) {
  detail::check_axis_inputs(x_rows, z_hat);
  const auto p = static_cast<std::size_t>(x_rows.cols());
  std::vector<AxisTrace> traces(p);
  parallel_for(p, threads, [&](std::size_t k) {
    traces[k] = trace_axis(static_cast<Eigen::Index>(k), grid, x_rows, z_hat, kinds, opts);
  });
  return traces;
}

/// Exactly one of the two fields is set.
struct PruneRule {
  std::optional<Eigen::Index> keep;
  std::optional<double> threshold;

  static PruneRule keep_count(Eigen::Index n) { return {n, std::nullopt}; }
  static PruneRule above(double g) { return {std::nullopt, g}; }
};

/// Drop axes by descending G(k): until `keep` remain, or every axis whose G
/// exceeds `threshold`. Ties in G remove the higher attribute index first.
/// The embedding is carried over untouched.
inline BiplotScene prune_axes(const Embedding& embedding, std::vector<AxisTrace> traces,
                              const PruneRule& rule) {
  if (rule.keep.has_value() == rule.threshold.has_value()) {
    throw std::invalid_argument("prune_axes: supply exactly one of keep or threshold");
  }
  const auto p = static_cast<Eigen::Index>(traces.size());
  if (rule.keep && (*rule.keep < 0 || *rule.keep > p)) {
    throw std::invalid_argument("prune_axes: keep must be in [0, " + std::to_string(p) + "]");
  }
  std::vector<std::size_t> order(traces.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (traces[a].avg_stress != traces[b].avg_stress) {
      return traces[a].avg_stress > traces[b].avg_stress;
    }
    return traces[a].attribute > traces[b].attribute;
  });
  std::vector<bool> drop(traces.size(), false);
  if (rule.keep) {
    const auto n_remove = static_cast<std::size_t>(p - *rule.keep);
    for (std::size_t i = 0; i < n_remove; ++i) drop[order[i]] = true;
  } else {
    for (std::size_t i : order) {
      if (traces[i].avg_stress > *rule.threshold) drop[i] = true;
    }
  }

  BiplotScene scene;
  scene.method = "gmb";
  scene.embedding = embedding;
  for (std::size_t i : order) {
    if (drop[i]) scene.removed.push_back({traces[i].attribute, traces[i].avg_stress});
  }
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (!drop[i]) scene.traces.push_back(std::move(traces[i]));
  }
  std::sort(scene.traces.begin(), scene.traces.end(),
            [](const AxisTrace& a, const AxisTrace& b) { return a.attribute < b.attribute; });
  return scene;
}

/// Inner-product closed form: l times row k of V_1.
inline Vector closed_form_axis_ip(Eigen::Index k, double ell, const Matrix& v1) {
  if (k < 0 || k >= v1.rows()) {
    throw std::invalid_argument("closed_form_axis_ip: attribute index out of range");
  }
  return ell * v1.row(k).transpose();
}

}  // namespace mdsbiplot
