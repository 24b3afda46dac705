#pragma once

// Comparison methods: Gabriel's PCA biplot, Gower's nonlinear biplot and the
// Data Context Map.

#include <array>
#include <cmath>
#include <string>

#include "mdsbiplot/dissimilarity.hpp"
#include "mdsbiplot/gmb.hpp"
#include "mdsbiplot/mds.hpp"
#include "mdsbiplot/numerics.hpp"

namespace mdsbiplot {

// ---------------------------------------------------------------------------
// PCA biplot

/// X ~ (b U_1 L_1^{alpha/2}) (L_1^{(1-alpha)/2} V_1' / b); here L holds the
/// eigenvalues of X'X, so L^{1/2} are the singular values.
struct PcaBiplot {
  double alpha = 1.0;
  double b = 1.0;
  Matrix points;  // n x m
  Matrix arrows;  // p x m
  Matrix V1;      // p x m
};

inline PcaBiplot pca_biplot(const Matrix& x, Eigen::Index m, double alpha = 1.0,
                            double b = 1.0) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("pca_biplot: alpha must be in [0, 1]");
  }
  if (!(b > 0.0)) throw std::invalid_argument("pca_biplot: b must be > 0");
  if (m < 1 || m > x.cols()) throw std::invalid_argument("pca_biplot: m must be in [1, p]");
  const SvdResult svd = svd_thin(x);
  if (m > svd.V.cols()) throw std::invalid_argument("pca_biplot: m exceeds min(n, p)");
  const Vector s = svd.singular_values.head(m);
  PcaBiplot out;
  out.alpha = alpha;
  out.b = b;
  out.V1 = svd.V.leftCols(m);
  out.points = b * svd.U.leftCols(m) * s.array().pow(alpha).matrix().asDiagonal();
  out.arrows = out.V1 * s.array().pow(1.0 - alpha).matrix().asDiagonal() / b;
  return out;
}

// ---------------------------------------------------------------------------
// Nonlinear biplot

inline Matrix nb_embed(const Matrix& d, Eigen::Index m) { return classical_mds(d, m); }

/// Projects extra HD points into a classical-MDS configuration with Gower's
/// add-a-point formula y = 1/2 (Z'Z)^{-1} Z' d.
class NonlinearBiplot {
 public:
  NonlinearBiplot(Matrix x, Matrix z, Dissimilarity kind) : x_(std::move(x)), z_(std::move(z)), kind_(kind) {
    if (!euclidean_embeddable(kind_)) {
      throw std::invalid_argument(
          "nonlinear biplot requires Euclidean embeddable dissimilarity (got " +
          to_string(kind_) + ")");
    }
    if (x_.rows() != z_.rows()) {
      throw std::invalid_argument("nonlinear biplot: X and Z row counts differ");
    }
    const Matrix d = pairwise(kind_, x_);
    const Matrix d2 = d.cwiseProduct(d);
    const double n = static_cast<double>(x_.rows());
    offset_ = d2.rowwise().sum() / n;
    offset_.array() -= d2.sum() / (2.0 * n * n);

    const EigenResult eig = eigh_symmetric(z_.transpose() * z_);
    const double cutoff = 1e-10 * std::max(eig.values(0), 0.0);
    if (!(eig.values(0) > 0.0) || eig.values(eig.values.size() - 1) <= cutoff) {
      throw NumericalError("nonlinear biplot: Z'Z is singular");
    }
    Vector inv(eig.values.size());
    for (Eigen::Index j = 0; j < inv.size(); ++j) inv(j) = 1.0 / eig.values(j);
    const Matrix ztz_inv = eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
    projector_ = 0.5 * ztz_inv * z_.transpose();
  }

  /// Build from X with Z taken from classical MDS of pairwise(kind, X).
  static NonlinearBiplot fit(const Matrix& x, Dissimilarity kind, Eigen::Index m) {
    if (!euclidean_embeddable(kind)) {
      throw std::invalid_argument(
          "nonlinear biplot requires Euclidean embeddable dissimilarity (got " +
          to_string(kind) + ")");
    }
    return NonlinearBiplot(x, nb_embed(pairwise(kind, x), m), kind);
  }

  Vector project(const Vector& x_new) const {
    if (x_new.size() != x_.cols()) {
      throw std::invalid_argument("nonlinear biplot: point has wrong dimension");
    }
    Vector dvec = offset_;
    for (Eigen::Index i = 0; i < x_.rows(); ++i) {
      const double di = delta(kind_, x_.row(i), x_new);
      dvec(i) -= di * di;
    }
    return projector_ * dvec;
  }

  AxisTrace trace(Eigen::Index k, const AxisGrid& grid) const {
    AxisTrace t;
    t.attribute = k;
    t.ell = detail::traced_values(grid, kind_);
    const AxisKinds kinds{kind_, Dissimilarity::euclidean};
    for (double ell : t.ell) {
      const Vector a = axis_point(k, ell, x_.cols());
      Vector b = project(a);
      t.point_stress.push_back(point_stress(b, a, x_, z_, kinds));
      t.points.push_back(std::move(b));
    }
    t.avg_stress = axis_avg_stress(t);
    return t;
  }

  const Matrix& Z() const { return z_; }
  Dissimilarity kind() const { return kind_; }

 private:
  Matrix x_;
  Matrix z_;
  Dissimilarity kind_;
  Vector offset_;     // (1/n) sum_j d_ij^2 - (1/2n^2) sum_ij d_ij^2
  Matrix projector_;  // 1/2 (Z'Z)^{-1} Z'
};

inline Vector nb_axis_point(const Vector& x_new, const Matrix& x, const Matrix& z,
                            Dissimilarity kind) {
  return NonlinearBiplot(x, z, kind).project(x_new);
}

// ---------------------------------------------------------------------------
// Data Context Map

struct CompositeDistanceMatrix {
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  Matrix dd;  // n x n, observation-observation (scaled)
  Matrix vv;  // p x p, attribute-attribute (scaled)
  Matrix dv;  // n x p, observation-attribute (scaled)
  std::array<double, 3> means_before{};  // dd, vv, dv
  std::array<double, 3> scale{1.0, 1.0, 1.0};
  Matrix fused;  // (n + p) x (n + p)
};

inline double pearson_correlation(const Eigen::Ref<const Vector>& a,
                                  const Eigen::Ref<const Vector>& b) {
  if (a.maxCoeff() == a.minCoeff() || b.maxCoeff() == b.minCoeff()) {
    throw std::invalid_argument("correlation undefined for a constant column");
  }
  const Vector ca = a.array() - a.mean();
  const Vector cb = b.array() - b.mean();
  const double denom = std::sqrt(ca.squaredNorm() * cb.squaredNorm());
  if (!(denom > 0.0)) {
    throw std::invalid_argument("correlation undefined for a constant column");
  }
  return std::clamp(ca.dot(cb) / denom, -1.0, 1.0);
}

namespace detail {

inline double off_diagonal_mean(const Matrix& m) {
  const Eigen::Index n = m.rows();
  if (n < 2) return 0.0;
  return (m.sum() - m.trace()) / static_cast<double>(n * (n - 1));
}

}  // namespace detail

/// Build and fuse the DD/VV/DV blocks. VV and DV are rescaled to the mean of
/// DD (off-diagonal means for the square blocks). A block whose mean is zero
/// cannot be rescaled and is left as is.
inline CompositeDistanceMatrix dcm_build_cdm(const Matrix& x01,
                                             Dissimilarity kind_dd = Dissimilarity::euclidean) {
  require_nonempty(x01, "dcm_build_cdm");
  require_finite(x01, "dcm_build_cdm");
  if (x01.cols() < 2) throw std::invalid_argument("dcm_build_cdm: need at least 2 attributes");
  if (x01.minCoeff() < -1e-12 || x01.maxCoeff() > 1.0 + 1e-12) {
    throw std::invalid_argument("dcm_build_cdm: data must be scaled to [0, 1]");
  }
  CompositeDistanceMatrix cdm;
  cdm.n = x01.rows();
  cdm.p = x01.cols();
  cdm.dd = pairwise(kind_dd, x01);
  cdm.vv = Matrix::Zero(cdm.p, cdm.p);
  for (Eigen::Index k = 0; k < cdm.p; ++k) {
    for (Eigen::Index l = k + 1; l < cdm.p; ++l) {
      const double v = 1.0 - pearson_correlation(x01.col(k), x01.col(l));
      cdm.vv(k, l) = v;
      cdm.vv(l, k) = v;
    }
  }
  cdm.dv = (1.0 - x01.array()).matrix();

  cdm.means_before = {detail::off_diagonal_mean(cdm.dd), detail::off_diagonal_mean(cdm.vv),
                      cdm.dv.mean()};
  const double target = cdm.means_before[0];
  if (target > 0.0) {
    for (std::size_t b = 1; b < 3; ++b) {
      if (cdm.means_before[b] > 0.0) cdm.scale[b] = target / cdm.means_before[b];
    }
  }
  cdm.vv *= cdm.scale[1];
  cdm.dv *= cdm.scale[2];

  const Eigen::Index total = cdm.n + cdm.p;
  cdm.fused = Matrix::Zero(total, total);
  cdm.fused.topLeftCorner(cdm.n, cdm.n) = cdm.dd;
  cdm.fused.bottomRightCorner(cdm.p, cdm.p) = cdm.vv;
  cdm.fused.topRightCorner(cdm.n, cdm.p) = cdm.dv;
  cdm.fused.bottomLeftCorner(cdm.p, cdm.n) = cdm.dv.transpose();
  cdm.fused.diagonal().setZero();
  return cdm;
}

struct DcmProjection {
  Embedding embedding;  // all n + p entities
  Matrix obs_points;    // n x m
  Matrix attr_points;   // p x m
};

/// Iterative MDS over the fused matrix, attributes treated as extra points.
inline DcmProjection dcm_project(const CompositeDistanceMatrix& cdm, Eigen::Index m,
                                 Dissimilarity kind_ld, const FitOptions& opts,
                                 Dissimilarity kind_dd = Dissimilarity::euclidean) {
  if (cdm.fused.rows() != cdm.n + cdm.p || !is_symmetric(cdm.fused)) {
    throw std::invalid_argument("dcm_project: malformed composite distance matrix");
  }
  DcmProjection out;
  out.embedding = fit_from_dissimilarities(cdm.fused, kind_dd, kind_ld, m, opts);
  out.obs_points = out.embedding.Z.topRows(cdm.n);
  out.attr_points = out.embedding.Z.bottomRows(cdm.p);
  return out;
}

}  // namespace mdsbiplot
