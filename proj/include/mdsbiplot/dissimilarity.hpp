#pragma once

// Dissimilarity metrics delta(x, y) with analytic gradients in y.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mdsbiplot/numerics.hpp"

namespace mdsbiplot {

enum class Dissimilarity {
  euclidean,
  manhattan,
  squared_euclidean,
  cosine,
  inner_product,
  sqrt_manhattan,
  clark,
};

inline constexpr std::array<Dissimilarity, 7> kAllDissimilarities = {
    Dissimilarity::euclidean,     Dissimilarity::manhattan,
    Dissimilarity::squared_euclidean, Dissimilarity::cosine,
    Dissimilarity::inner_product, Dissimilarity::sqrt_manhattan,
    Dissimilarity::clark,
};

/// Distances closer than this are replaced by it wherever they appear in a
/// denominator of a gradient.
inline constexpr double kSingularEps = 1e-9;

inline std::string_view name_of(Dissimilarity kind) {
  switch (kind) {
    case Dissimilarity::euclidean: return "euclidean";
    case Dissimilarity::manhattan: return "manhattan";
    case Dissimilarity::squared_euclidean: return "squared_euclidean";
    case Dissimilarity::cosine: return "cosine";
    case Dissimilarity::inner_product: return "inner_product";
    case Dissimilarity::sqrt_manhattan: return "sqrt_manhattan";
    case Dissimilarity::clark: return "clark";
  }
  return "euclidean";
}

inline std::string to_string(Dissimilarity kind) { return std::string(name_of(kind)); }

inline Dissimilarity parse_dissimilarity(std::string_view name) {
  for (auto kind : kAllDissimilarities) {
    if (name_of(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown dissimilarity '" + std::string(name) + "'");
}

/// Realizable exactly as Euclidean distances of some configuration.
inline constexpr bool euclidean_embeddable(Dissimilarity kind) {
  return kind == Dissimilarity::euclidean || kind == Dissimilarity::sqrt_manhattan ||
         kind == Dissimilarity::clark;
}

inline constexpr bool requires_nonnegative_inputs(Dissimilarity kind) {
  return kind == Dissimilarity::clark;
}

namespace detail {

template <class A, class B>
void check_lengths(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("dissimilarity: length mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
  }
}

template <class A>
double norm_of(const Eigen::MatrixBase<A>& x) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) s += x(k) * x(k);
  return std::sqrt(s);
}

template <class A, class B>
double dot_of(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) s += x(k) * y(k);
  return s;
}

template <class A, class B>
void check_clark(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (!(x(k) >= 0.0) || !(y(k) >= 0.0)) {
      throw std::invalid_argument("clark: coordinates must be nonnegative (coordinate " +
                                  std::to_string(k) + ")");
    }
  }
}

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace detail

template <class A, class B>
double delta(Dissimilarity kind, const Eigen::MatrixBase<A>& x,
             const Eigen::MatrixBase<B>& y) {
  detail::check_lengths(x, y);
  const Eigen::Index p = x.size();
  switch (kind) {
    case Dissimilarity::euclidean:
    case Dissimilarity::squared_euclidean: {
      double s = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) {
        const double d = x(k) - y(k);
        s += d * d;
      }
      return kind == Dissimilarity::euclidean ? std::sqrt(s) : s;
    }
    case Dissimilarity::manhattan:
    case Dissimilarity::sqrt_manhattan: {
      double s = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) s += std::abs(x(k) - y(k));
      return kind == Dissimilarity::manhattan ? s : std::sqrt(s);
    }
    case Dissimilarity::cosine: {
      const double sx = detail::dot_of(x, x);
      const double sy = detail::dot_of(y, y);
      if (!(sx > 0.0) || !(sy > 0.0)) {
        throw std::invalid_argument("cosine: dissimilarity undefined for a zero vector");
      }
      const double c = detail::dot_of(x, y) / std::sqrt(sx * sy);
      return 1.0 - std::clamp(c, -1.0, 1.0);
    }
    case Dissimilarity::inner_product:
      return detail::dot_of(x, y);
    case Dissimilarity::clark: {
      detail::check_clark(x, y);
      double s = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) {
        const double sum = x(k) + y(k);
        if (sum == 0.0) continue;  // 0/0 term: both coordinates zero
        const double r = (x(k) - y(k)) / sum;
        s += r * r;
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

namespace detail {

// Gradient of delta(x, .) at y. With `clamp`, distances below kSingularEps in
// denominators are replaced by kSingularEps; without it, singular points throw.
template <class A, class B>
Vector grad_delta_y_impl(Dissimilarity kind, const Eigen::MatrixBase<A>& x,
                         const Eigen::MatrixBase<B>& y, bool clamp) {
  check_lengths(x, y);
  const Eigen::Index p = x.size();
  Vector g(p);
  auto singular = [&](double dist) {
    if (dist > 0.0) return dist;
    if (clamp) return kSingularEps;
    throw std::invalid_argument("gradient undefined at coincident points");
  };
  switch (kind) {
    case Dissimilarity::euclidean: {
      double s = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) s += (y(k) - x(k)) * (y(k) - x(k));
      double d = std::sqrt(s);
      d = clamp ? std::max(d, kSingularEps) : singular(d);
      for (Eigen::Index k = 0; k < p; ++k) g(k) = (y(k) - x(k)) / d;
      return g;
    }
    case Dissimilarity::squared_euclidean:
      for (Eigen::Index k = 0; k < p; ++k) g(k) = 2.0 * (y(k) - x(k));
      return g;
    case Dissimilarity::manhattan:
      for (Eigen::Index k = 0; k < p; ++k) g(k) = sign(y(k) - x(k));
      return g;
    case Dissimilarity::sqrt_manhattan: {
      double s = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) s += std::abs(x(k) - y(k));
      double d = std::sqrt(s);
      d = clamp ? std::max(d, kSingularEps) : singular(d);
      for (Eigen::Index k = 0; k < p; ++k) g(k) = sign(y(k) - x(k)) / (2.0 * d);
      return g;
    }
    case Dissimilarity::cosine: {
      double nx = norm_of(x);
      double ny = norm_of(y);
      if (clamp) {
        nx = std::max(nx, kSingularEps);
        ny = std::max(ny, kSingularEps);
      } else if (!(nx > 0.0) || !(ny > 0.0)) {
        throw std::invalid_argument("cosine: gradient undefined for a zero vector");
      }
      const double xy = dot_of(x, y);
      for (Eigen::Index k = 0; k < p; ++k) {
        g(k) = -(x(k) / (nx * ny) - xy * y(k) / (nx * ny * ny * ny));
      }
      return g;
    }
    case Dissimilarity::inner_product:
      for (Eigen::Index k = 0; k < p; ++k) g(k) = x(k);
      return g;
    case Dissimilarity::clark: {
      check_clark(x, y);
      double s = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) {
        const double sum = x(k) + y(k);
        if (sum == 0.0) continue;
        const double r = (x(k) - y(k)) / sum;
        s += r * r;
      }
      double d = std::sqrt(s);
      d = clamp ? std::max(d, kSingularEps) : singular(d);
      for (Eigen::Index k = 0; k < p; ++k) {
        const double sum = x(k) + y(k);
        if (sum == 0.0) continue;
        const double r = (x(k) - y(k)) / sum;
        g(k) = -2.0 * x(k) * r / (sum * sum * d);
      }
      return g;
    }
  }
  return g;
}

}  // namespace detail

/// d delta(x, y) / dy. Manhattan kinks use sign(0) = 0. Throws at the
/// singular points of the euclidean family.
template <class A, class B>
Vector grad_delta_y(Dissimilarity kind, const Eigen::MatrixBase<A>& x,
                    const Eigen::MatrixBase<B>& y) {
  return detail::grad_delta_y_impl(kind, x, y, false);
}

/// Same as grad_delta_y but with the epsilon clamp the optimizers use.
template <class A, class B>
Vector grad_delta_y_clamped(Dissimilarity kind, const Eigen::MatrixBase<A>& x,
                            const Eigen::MatrixBase<B>& y) {
  return detail::grad_delta_y_impl(kind, x, y, true);
}

/// n x n matrix of delta between rows of X.
inline Matrix pairwise(Dissimilarity kind, const Matrix& x) {
  require_nonempty(x, "pairwise");
  const Eigen::Index n = x.rows();
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double d = delta(kind, x.row(i), x.row(j));
      if (i == j && kind != Dissimilarity::inner_product) d = 0.0;
      out(i, j) = d;
      out(j, i) = d;
    }
  }
  return out;
}

}  // namespace mdsbiplot
