#pragma once

// Low-dimensional embeddings: Torgerson classical MDS, PCA projection, and
// iterative minimization of the squared-loss stress
//
//   f(Z) = sum_i sum_j (delta_HD(x_i, x_j) - delta_LD(z_i, z_j))^2
//
// over all ordered pairs, diagonal included.

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mdsbiplot/descent.hpp"
#include "mdsbiplot/dissimilarity.hpp"
#include "mdsbiplot/numerics.hpp"

namespace mdsbiplot {

enum class InitMode { classical, random, given };

inline std::string to_string(InitMode mode) {
  switch (mode) {
    case InitMode::classical: return "classical";
    case InitMode::random: return "random";
    case InitMode::given: return "given";
  }
  return "classical";
}

inline InitMode parse_init_mode(const std::string& name) {
  if (name == "classical") return InitMode::classical;
  if (name == "random") return InitMode::random;
  if (name == "given") return InitMode::given;
  throw std::invalid_argument("unknown init mode '" + name + "'");
}

inline std::string to_string(StepRule rule) {
  return rule == StepRule::fixed ? "fixed" : "backtracking";
}

inline StepRule parse_step_rule(const std::string& name) {
  if (name == "fixed") return StepRule::fixed;
  if (name == "backtracking") return StepRule::backtracking;
  throw std::invalid_argument("unknown step rule '" + name + "'");
}

struct FitOptions {
  int max_iterations = 2000;
  double tolerance = 1e-8;
  StepRule step_rule = StepRule::backtracking;
  double fixed_step = 1e-3;  // only used with StepRule::fixed
  int restarts = 0;
  InitMode init = InitMode::classical;
  Matrix initial;  // InitMode::given
  std::uint64_t seed = 0;

  void validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
    if (restarts < 0) throw std::invalid_argument("restarts must be >= 0");
  }
};

struct Embedding {
  Matrix Z;
  Dissimilarity kind_hd = Dissimilarity::euclidean;
  Dissimilarity kind_ld = Dissimilarity::euclidean;
  double final_stress = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  std::vector<double> stress_trace;

  Eigen::Index n() const { return Z.rows(); }
  Eigen::Index m() const { return Z.cols(); }
};

/// Stress of Z against a precomputed n x n matrix of HD dissimilarities.
inline double stress_from_dissimilarities(const Matrix& z, const Matrix& hd,
                                          Dissimilarity kind_ld) {
  if (hd.rows() != z.rows() || hd.cols() != z.rows()) {
    throw std::invalid_argument("stress: dissimilarity matrix does not match Z");
  }
  const Eigen::Index n = z.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rd = hd(i, i) - delta(kind_ld, z.row(i), z.row(i));
    total += rd * rd;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = hd(i, j) - delta(kind_ld, z.row(i), z.row(j));
      total += 2.0 * r * r;
    }
  }
  return total;
}

inline double stress(const Matrix& z, const Matrix& x, Dissimilarity kind_hd,
                     Dissimilarity kind_ld) {
  if (z.rows() != x.rows()) {
    throw std::invalid_argument("stress: Z and X row counts differ");
  }
  return stress_from_dissimilarities(z, pairwise(kind_hd, x), kind_ld);
}

/// Gradient of the stress with respect to every z_i (n x m). Requires both
/// dissimilarities to be symmetric, which all registered kinds are.
inline Matrix stress_gradient_from_dissimilarities(const Matrix& z, const Matrix& hd,
                                                   Dissimilarity kind_ld) {
  if (hd.rows() != z.rows() || hd.cols() != z.rows()) {
    throw std::invalid_argument("stress_gradient: dissimilarity matrix does not match Z");
  }
  const Eigen::Index n = z.rows();
  Matrix g = Matrix::Zero(n, z.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rd = hd(i, i) - delta(kind_ld, z.row(i), z.row(i));
    if (rd != 0.0) {
      g.row(i) += (-4.0 * rd) * grad_delta_y_clamped(kind_ld, z.row(i), z.row(i)).transpose();
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = hd(i, j) - delta(kind_ld, z.row(i), z.row(j));
      if (r == 0.0) continue;
      g.row(j) += (-4.0 * r) * grad_delta_y_clamped(kind_ld, z.row(i), z.row(j)).transpose();
      g.row(i) += (-4.0 * r) * grad_delta_y_clamped(kind_ld, z.row(j), z.row(i)).transpose();
    }
  }
  return g;
}

inline Matrix stress_gradient(const Matrix& z, const Matrix& x, Dissimilarity kind_hd,
                              Dissimilarity kind_ld) {
  if (z.rows() != x.rows()) {
    throw std::invalid_argument("stress_gradient: Z and X row counts differ");
  }
  return stress_gradient_from_dissimilarities(z, pairwise(kind_hd, x), kind_ld);
}

/// Number of eigenvalues above 1e-10 * max(1, lambda_max).
inline Eigen::Index count_positive(const Vector& values) {
  const double cutoff = 1e-10 * std::max(1.0, values.size() ? values(0) : 0.0);
  Eigen::Index count = 0;
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    if (values(j) > cutoff) ++count;
  }
  return count;
}

/// Torgerson classical MDS: the first m columns of V Lambda^{1/2} from the
/// eigendecomposition of the double-centered squared distances.
inline Matrix classical_mds(const Matrix& d, Eigen::Index m) {
  require_nonempty(d, "classical_mds");
  if (d.rows() != d.cols()) {
    throw std::invalid_argument("classical_mds: distance matrix is not square");
  }
  if (d.minCoeff() < 0.0) {
    throw std::invalid_argument("classical_mds: negative distance");
  }
  if (m < 1) throw std::invalid_argument("classical_mds: m must be >= 1");
  const Matrix b = double_center(d.cwiseProduct(d));
  const EigenResult eig = eigh_symmetric(b);
  const Eigen::Index positive = count_positive(eig.values);
  if (m > positive) {
    std::ostringstream msg;
    msg << "classical_mds: m=" << m << " exceeds the " << positive
        << " positive eigenvalues; spectrum:";
    for (Eigen::Index j = 0; j < eig.values.size(); ++j) msg << ' ' << eig.values(j);
    throw std::invalid_argument(msg.str());
  }
  return eig.vectors.leftCols(m) * eig.values.head(m).cwiseSqrt().asDiagonal();
}

/// Scores on the first m principal axes, X V_1. X is expected centered.
inline Matrix pca_project(const Matrix& x, Eigen::Index m) {
  require_nonempty(x, "pca_project");
  if (m < 1 || m > x.cols()) {
    throw std::invalid_argument("pca_project: m must be in [1, p]");
  }
  const SvdResult svd = svd_thin(x);
  if (m > svd.V.cols()) {
    throw std::invalid_argument("pca_project: m exceeds rank bound min(n, p)");
  }
  return x * svd.V.leftCols(m);
}

/// Share of total variance kept by the first m principal axes.
inline double proportion_of_variance(const Matrix& x, Eigen::Index m) {
  const SvdResult svd = svd_thin(x);
  const Vector lambda = svd.singular_values.cwiseAbs2();
  const double total = lambda.sum();
  if (!(total > 0.0)) throw std::invalid_argument("proportion_of_variance: zero data");
  m = std::min<Eigen::Index>(m, lambda.size());
  return lambda.head(m).sum() / total;
}

namespace detail {

inline Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                             double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(lo, hi);
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = unif(rng);
  }
  return out;
}

// Classical start from arbitrary HD dissimilarities. The matrix is treated as
// distances; a Gram matrix (inner products) is first turned into distances via
// d_ij^2 = g_ii + g_jj - 2 g_ij. Columns beyond the positive spectrum are
// filled with small seeded noise so no coordinate starts identically zero.
inline Matrix classical_start(const Matrix& hd, Dissimilarity kind_hd, Eigen::Index m,
                              std::uint64_t seed) {
  const Eigen::Index n = hd.rows();
  Matrix d2(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double v;
      if (i == j) {
        v = 0.0;
      } else if (kind_hd == Dissimilarity::inner_product) {
        v = std::max(0.0, hd(i, i) + hd(j, j) - hd(i, j) - hd(j, i));
      } else {
        const double s = 0.5 * (std::abs(hd(i, j)) + std::abs(hd(j, i)));
        v = s * s;
      }
      d2(i, j) = v;
    }
  }
  Matrix z = Matrix::Zero(n, m);
  if (n == 1) return z;
  const EigenResult eig = eigh_symmetric(double_center(d2));
  const Eigen::Index positive = std::min(count_positive(eig.values), m);
  for (Eigen::Index j = 0; j < positive; ++j) {
    z.col(j) = eig.vectors.col(j) * std::sqrt(eig.values(j));
  }
  if (positive < m) {
    const double scale = positive > 0 ? 1e-3 * std::sqrt(eig.values(0)) : 1e-3;
    const Matrix noise = uniform_matrix(n, m - positive, seed, -scale, scale);
    z.rightCols(m - positive) = noise;
  }
  return z;
}

inline Embedding fit_once(const Matrix& hd, Dissimilarity kind_hd, Dissimilarity kind_ld,
                          Eigen::Index m, const FitOptions& opts, InitMode init,
                          std::uint64_t seed) {
  const Eigen::Index n = hd.rows();
  Matrix z0;
  switch (init) {
    case InitMode::classical:
      z0 = classical_start(hd, kind_hd, m, seed);
      break;
    case InitMode::random:
      z0 = uniform_matrix(n, m, seed, -1.0, 1.0);
      break;
    case InitMode::given:
      if (opts.initial.rows() != n || opts.initial.cols() != m) {
        throw std::invalid_argument("fit_mds: given initial configuration has wrong shape");
      }
      z0 = opts.initial;
      break;
  }
  DescentOptions dopts;
  dopts.max_iterations = opts.max_iterations;
  dopts.tolerance = opts.tolerance;
  dopts.step_rule = opts.step_rule;
  dopts.initial_step = opts.step_rule == StepRule::fixed ? opts.fixed_step : 1.0;
  auto objective = [&](const Matrix& z, Matrix* grad) {
    if (grad) *grad = stress_gradient_from_dissimilarities(z, hd, kind_ld);
    return stress_from_dissimilarities(z, hd, kind_ld);
  };
  DescentResult res = descend(objective, std::move(z0), dopts);
  Embedding emb;
  emb.Z = std::move(res.x);
  emb.kind_hd = kind_hd;
  emb.kind_ld = kind_ld;
  emb.final_stress = res.value;
  emb.iterations = res.iterations;
  emb.seed = seed;
  emb.converged = res.converged;
  emb.stress_trace = std::move(res.trace);
  return emb;
}

}  // namespace detail

/// Fit an embedding to a precomputed HD dissimilarity matrix. `kind_hd` is
/// recorded in the result and selects the Gram conversion for classical init.
inline Embedding fit_from_dissimilarities(const Matrix& hd, Dissimilarity kind_hd,
                                          Dissimilarity kind_ld, Eigen::Index m,
                                          const FitOptions& opts) {
  opts.validate();
  require_nonempty(hd, "fit_mds");
  require_finite(hd, "fit_mds");
  if (hd.rows() != hd.cols()) {
    throw std::invalid_argument("fit_mds: dissimilarity matrix is not square");
  }
  if (m < 1) throw std::invalid_argument("fit_mds: m must be >= 1");

  Embedding best = detail::fit_once(hd, kind_hd, kind_ld, m, opts, opts.init, opts.seed);
  for (int r = 1; r <= opts.restarts; ++r) {
    const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(r);
    Embedding candidate = detail::fit_once(hd, kind_hd, kind_ld, m, opts, InitMode::random, seed);
    // strict comparison keeps the lowest seed on ties
    if (candidate.final_stress < best.final_stress) best = std::move(candidate);
  }
  return best;
}

inline Embedding fit_mds(const Matrix& x, Dissimilarity kind_hd, Dissimilarity kind_ld,
                         Eigen::Index m, const FitOptions& opts = {}) {
  return fit_from_dissimilarities(pairwise(kind_hd, x), kind_hd, kind_ld, m, opts);
}

}  // namespace mdsbiplot
