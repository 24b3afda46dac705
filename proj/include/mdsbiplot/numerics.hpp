#pragma once

// Dense real-matrix primitives shared by every other module: column
// centering/scaling, symmetric eigendecomposition, thin SVD and the
// Torgerson double-centering transform.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "mdsbiplot/error.hpp"

namespace mdsbiplot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigenpairs of a symmetric matrix, values sorted descending.
struct EigenResult {
  Vector values;
  Matrix vectors;  // column j pairs with values(j)
};

/// Thin SVD X = U diag(s) V'.
struct SvdResult {
  Matrix U;
  Vector singular_values;
  Matrix V;
};

enum class ScaleMode { zscore, unit_interval, none };

inline std::string to_string(ScaleMode mode) {
  switch (mode) {
    case ScaleMode::zscore: return "zscore";
    case ScaleMode::unit_interval: return "unit_interval";
    case ScaleMode::none: return "none";
  }
  return "none";
}

inline ScaleMode parse_scale_mode(const std::string& name) {
  if (name == "zscore") return ScaleMode::zscore;
  if (name == "unit_interval") return ScaleMode::unit_interval;
  if (name == "none") return ScaleMode::none;
  throw std::invalid_argument("unknown scaling mode '" + name +
                              "' (expected zscore, unit_interval or none)");
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw NumericalError(std::string(what) + ": matrix contains NaN or Inf");
  }
}

inline void require_nonempty(const Matrix& m, const char* what) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw std::invalid_argument(std::string(what) + ": empty matrix");
  }
}

/// Largest absolute asymmetry |S(i,j) - S(j,i)|.
inline double asymmetry(const Matrix& s) {
  return (s - s.transpose()).cwiseAbs().maxCoeff();
}

inline bool is_symmetric(const Matrix& s, double tol = 1e-10) {
  if (s.rows() != s.cols()) return false;
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  return asymmetry(s) <= tol * scale;
}

inline Matrix center_columns(const Matrix& x) {
  require_nonempty(x, "center_columns");
  if (x.rows() < 2) {
    throw std::invalid_argument("degenerate: cannot center one observation");
  }
  Matrix out = x.rowwise() - x.colwise().mean();
  return out;
}

/// Sample standard deviation with divisor n-1.
inline double sample_sd(const Eigen::Ref<const Vector>& col) {
  const double mean = col.mean();
  const double ss = (col.array() - mean).square().sum();
  return std::sqrt(ss / static_cast<double>(col.size() - 1));
}

inline Matrix scale_columns(const Matrix& x, ScaleMode mode) {
  require_nonempty(x, "scale_columns");
  if (mode == ScaleMode::none) return x;
  if (x.rows() < 2) {
    throw std::invalid_argument("degenerate: cannot scale one observation");
  }
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto col = x.col(j);
    if (mode == ScaleMode::zscore) {
      const double sd = sample_sd(col);
      if (!(sd > 0.0)) {
        throw std::invalid_argument("column " + std::to_string(j) +
                                    " is constant (zero variance)");
      }
      out.col(j) = (col.array() - col.mean()) / sd;
    } else {
      const double lo = col.minCoeff();
      const double hi = col.maxCoeff();
      if (!(hi > lo)) {
        throw std::invalid_argument("column " + std::to_string(j) +
                                    " is constant (max == min)");
      }
      out.col(j) = (col.array() - lo) / (hi - lo);
      // pin the endpoints exactly; (hi - lo) / (hi - lo) can round
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (col(i) == lo) out(i, j) = 0.0;
        if (col(i) == hi) out(i, j) = 1.0;
      }
    }
  }
  return out;
}

namespace detail {

// Flip columns so the largest-magnitude entry of each is positive (ties go to
// the first such entry). Returns the applied signs.
inline Vector canonicalize_signs(Matrix& vectors) {
  Vector signs = Vector::Ones(vectors.cols());
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (vectors(arg, j) < 0.0) {
      vectors.col(j) = -vectors.col(j);
      signs(j) = -1.0;
    }
  }
  return signs;
}

}  // namespace detail

/// Symmetric eigendecomposition, eigenvalues descending, each eigenvector
/// signed so that its largest-magnitude entry is positive.
inline EigenResult eigh_symmetric(const Matrix& s) {
  require_nonempty(s, "eigh_symmetric");
  require_finite(s, "eigh_symmetric");
  if (s.rows() != s.cols()) {
    throw std::invalid_argument("eigh_symmetric: matrix is not square");
  }
  if (!is_symmetric(s)) {
    throw std::invalid_argument("eigh_symmetric: matrix is not symmetric");
  }
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigh_symmetric: eigensolver did not converge");
  }
  const Eigen::Index n = s.rows();
  EigenResult out{Vector(n), Matrix(n, n)};
  // Eigen returns ascending order
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = solver.eigenvalues()(n - 1 - j);
    out.vectors.col(j) = solver.eigenvectors().col(n - 1 - j);
  }
  detail::canonicalize_signs(out.vectors);
  return out;
}

/// Thin SVD. U is n x r, V is p x r with r = min(n, p). The sign of each V
/// column follows the eigenvector convention and U is flipped to match.
inline SvdResult svd_thin(const Matrix& x) {
  require_nonempty(x, "svd_thin");
  require_finite(x, "svd_thin");
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  const Vector signs = detail::canonicalize_signs(out.V);
  out.U = out.U * signs.asDiagonal();
  return out;
}

/// B = -1/2 J D2 J with J = I - 11'/n.
inline Matrix double_center(const Matrix& d2) {
  require_nonempty(d2, "double_center");
  require_finite(d2, "double_center");
  if (d2.rows() != d2.cols()) {
    throw std::invalid_argument("double_center: matrix is not square");
  }
  if (!is_symmetric(d2)) {
    throw std::invalid_argument("double_center: matrix is not symmetric");
  }
  if (d2.minCoeff() < 0.0) {
    throw std::invalid_argument("double_center: negative squared distance");
  }
  if (d2.diagonal().cwiseAbs().maxCoeff() > 0.0) {
    throw std::invalid_argument("double_center: nonzero diagonal");
  }
  const Vector row_mean = d2.rowwise().mean();
  const Vector col_mean = d2.colwise().mean().transpose();
  const double grand = d2.mean();
  Matrix b(d2.rows(), d2.cols());
  for (Eigen::Index i = 0; i < d2.rows(); ++i) {
    for (Eigen::Index j = 0; j < d2.cols(); ++j) {
      b(i, j) = -0.5 * (d2(i, j) - row_mean(i) - col_mean(j) + grand);
    }
  }
  return 0.5 * (b + b.transpose());
}

}  // namespace mdsbiplot
