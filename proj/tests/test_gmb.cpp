#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "mdsbiplot/gmb.hpp"
#include "test_support.hpp"

using namespace mdsbiplot;
using mdsbiplot::testing::central_difference;
using mdsbiplot::testing::random_centered;
using mdsbiplot::testing::random_matrix;

namespace {

constexpr AxisKinds kIp{Dissimilarity::inner_product, Dissimilarity::inner_product};
constexpr AxisKinds kEuc{Dissimilarity::euclidean, Dissimilarity::euclidean};

struct BruteForce {
  double value;
  Vector at;
};

// Exhaustive search of the per-point objective on a 201 x 201 lattice.
BruteForce lattice_minimum(const Matrix& x, const Matrix& z, AxisKinds kinds, const Vector& a,
                           double r) {
  BruteForce best{std::numeric_limits<double>::infinity(), Vector::Zero(2)};
  Vector b(2);
  for (int i = 0; i <= 200; ++i) {
    for (int j = 0; j <= 200; ++j) {
      b << -r + 2.0 * r * i / 200.0, -r + 2.0 * r * j / 200.0;
      double s = 0.0;
      for (Eigen::Index o = 0; o < x.rows(); ++o) {
        const double res = delta(kinds.hd, x.row(o), a) - delta(kinds.ld, z.row(o), b);
        s += res * res;
      }
      if (s < best.value) best = {s, b};
    }
  }
  return best;
}

double max_row_norm(const Matrix& z) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) r = std::max(r, z.row(i).norm());
  return r;
}

AxisTrace make_trace(Eigen::Index k, double g) {
  AxisTrace t;
  t.attribute = k;
  t.ell = {0.0};
  t.points = {Vector::Zero(2)};
  t.point_stress = {g};
  t.avg_stress = g;
  return t;
}

}  // namespace

TEST(AxisGrid, DefaultSpacing) {
  const AxisGrid g = AxisGrid::uniform(5.0, 0.1);
  ASSERT_EQ(g.values.size(), 101u);
  EXPECT_EQ(g.values.front(), -5.0);
  EXPECT_EQ(g.values.back(), 5.0);
  EXPECT_EQ(g.values[50], 0.0);
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    EXPECT_EQ(g.values[i], -g.values[g.values.size() - 1 - i]);
  }
  EXPECT_EQ(AxisGrid::uniform(0.0, 0.1).values, std::vector<double>{0.0});
  EXPECT_THROW(AxisGrid::uniform(1.0, 0.3), std::invalid_argument);
  EXPECT_THROW(AxisGrid::uniform(1.0, 0.0), std::invalid_argument);
}

TEST(AxisPoint, Examples) {
  EXPECT_EQ(axis_point(0, 2.0, 3), (Vector(3) << 2, 0, 0).finished());
  EXPECT_TRUE(axis_point(1, 0.0, 4).isZero());
  Vector expect = Vector::Zero(8);
  expect(2) = -5.0;
  EXPECT_EQ(axis_point(2, -5.0, 8), expect);
  EXPECT_THROW(axis_point(3, 1.0, 3), std::invalid_argument);
  EXPECT_THROW(axis_point(-1, 1.0, 3), std::invalid_argument);
}

TEST(SolveAxisPoint, InnerProductMatchesClosedForm) {
  std::mt19937_64 rng(21);
  const Matrix x = random_centered(rng, 12, 4);
  const SvdResult svd = svd_thin(x);
  const Matrix v1 = svd.V.leftCols(2);
  const Matrix z = x * v1;
  for (Eigen::Index k = 0; k < 4; ++k) {
    for (double ell : {-3.0, 1.0, 2.5}) {
      const Vector b = solve_axis_point(x, z, kIp, axis_point(k, ell, 4), Vector::Zero(2));
      EXPECT_LT((b - closed_form_axis_ip(k, ell, v1)).norm(), 1e-5);
    }
  }
}

TEST(SolveAxisPoint, StationaryAndNoWorseThanInit) {
  std::mt19937_64 rng(22);
  const Matrix x = random_matrix(rng, 7, 3);
  const Matrix z = random_matrix(rng, 7, 2);
  const Vector a = axis_point(1, 0.7, 3);
  const Vector init = (Vector(2) << 0.2, -0.4).finished();
  const Vector b = solve_axis_point(x, z, kEuc, a, init);
  EXPECT_LE(point_stress(b, a, x, z, kEuc), point_stress(init, a, x, z, kEuc));
  const Matrix fd = central_difference(
      [&](const Matrix& v) { return point_stress(v.col(0), a, x, z, kEuc); }, Matrix(b));
  EXPECT_LT(fd.norm(), 1e-6);
}

TEST(SolveAxisPoint, OriginMatchesLatticeSearch) {
  std::mt19937_64 rng(23);
  const Matrix x = random_matrix(rng, 5, 3);
  const Matrix z = random_matrix(rng, 5, 2);
  const double r = 2.0 * max_row_norm(z);
  for (auto hd : {Dissimilarity::euclidean, Dissimilarity::manhattan,
                  Dissimilarity::squared_euclidean}) {
    const AxisKinds kinds{hd, Dissimilarity::euclidean};
    const Vector a = Vector::Zero(3);
    const BruteForce bf = lattice_minimum(x, z, kinds, a, r);
    const Vector b = solve_axis_point(x, z, kinds, a, Vector::Zero(2));
    EXPECT_LE(point_stress(b, a, x, z, kinds), bf.value + 1e-12) << to_string(hd);
    EXPECT_LT((b - bf.at).cwiseAbs().maxCoeff(), 2.0 * r / 200.0) << to_string(hd);
  }
}

TEST(SolveAxisPoint, PropertyNoWorseThanLattice) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = std::uniform_int_distribution<int>(3, 6)(rng);
    const Eigen::Index p = std::uniform_int_distribution<int>(2, 4)(rng);
    const Matrix x = random_matrix(rng, n, p);
    const Matrix z = random_matrix(rng, n, 2);
    const Eigen::Index k = std::uniform_int_distribution<int>(0, static_cast<int>(p) - 1)(rng);
    const Vector a = axis_point(k, std::uniform_real_distribution<double>(-2, 2)(rng), p);
    const BruteForce bf = lattice_minimum(x, z, kEuc, a, 2.0 * max_row_norm(z));
    const Vector b = solve_axis_point(x, z, kEuc, a, Vector::Zero(2));
    EXPECT_LE(point_stress(b, a, x, z, kEuc), bf.value + 1e-12) << "trial " << trial;
  }
}

TEST(SolveAxisPoint, CosineIgnoresAxisLength) {
  std::mt19937_64 rng(25);
  const Matrix x = random_matrix(rng, 9, 3);
  const Matrix z = random_matrix(rng, 9, 2);
  const AxisKinds kinds{Dissimilarity::cosine, Dissimilarity::euclidean};
  const Vector b1 = solve_axis_point(x, z, kinds, axis_point(0, 1.0, 3), Vector::Zero(2));
  const Vector b2 = solve_axis_point(x, z, kinds, axis_point(0, 2.0, 3), Vector::Zero(2));
  EXPECT_LT((b1 - b2).norm(), 1e-6);
}

TEST(TraceAxis, InnerProductIsStraightSegment) {
  std::mt19937_64 rng(26);
  const Matrix x = random_centered(rng, 15, 5);
  const Matrix v1 = svd_thin(x).V.leftCols(2);
  const Matrix z = x * v1;
  const AxisGrid grid = AxisGrid::uniform(5.0, 0.1);
  for (Eigen::Index k = 0; k < 5; ++k) {
    const AxisTrace t = trace_axis(k, grid, x, z, kIp);
    ASSERT_EQ(t.points.size(), grid.values.size());
    for (std::size_t i = 0; i < t.points.size(); ++i) {
      EXPECT_LT((t.points[i] - closed_form_axis_ip(k, t.ell[i], v1)).norm(), 1e-5);
    }
  }
}

TEST(TraceAxis, CosineCollapsesToOnePoint) {
  std::mt19937_64 rng(27);
  const Matrix x = random_matrix(rng, 10, 4);
  const Matrix z = fit_mds(x, Dissimilarity::cosine, Dissimilarity::euclidean, 2).Z;
  const AxisKinds kinds{Dissimilarity::cosine, Dissimilarity::euclidean};
  for (Eigen::Index k = 0; k < 4; ++k) {
    const AxisTrace t = trace_axis(k, AxisGrid::uniform(5.0, 0.1), x, z, kinds);
    EXPECT_EQ(t.points.size(), 50u);
    EXPECT_GT(t.ell.front(), 0.0);
    double diameter = 0.0;
    for (const auto& a : t.points)
      for (const auto& b : t.points) diameter = std::max(diameter, (a - b).norm());
    EXPECT_LT(diameter, 1e-5);
  }
}

TEST(TraceAxis, ClarkTracesNonnegativeHalf) {
  std::mt19937_64 rng(33);
  const Matrix x = random_matrix(rng, 6, 3, 0.0, 1.0);
  const Matrix z = random_matrix(rng, 6, 2);
  const AxisTrace t = trace_axis(0, AxisGrid::uniform(1.0, 0.5), x, z,
                                 {Dissimilarity::clark, Dissimilarity::euclidean});
  EXPECT_EQ(t.ell, (std::vector<double>{0.0, 0.5, 1.0}));
}

TEST(TraceAxis, SinglePointGrid) {
  std::mt19937_64 rng(28);
  const Matrix x = random_matrix(rng, 6, 3);
  const Matrix z = random_matrix(rng, 6, 2);
  const AxisTrace t = trace_axis(1, AxisGrid::uniform(0.0, 0.1), x, z, kEuc);
  ASSERT_EQ(t.points.size(), 1u);
  EXPECT_EQ(t.avg_stress, t.point_stress[0]);
}

TEST(TraceAxis, InvariantsAndFixedEmbedding) {
  std::mt19937_64 rng(29);
  const Matrix x = random_matrix(rng, 8, 3);
  const Matrix z = fit_mds(x, Dissimilarity::manhattan, Dissimilarity::euclidean, 2).Z;
  const Matrix z_copy = z;
  const auto traces = trace_all_axes(AxisGrid::uniform(2.0, 0.5), x, z,
                                     {Dissimilarity::manhattan, Dissimilarity::euclidean});
  EXPECT_EQ(std::memcmp(z.data(), z_copy.data(), sizeof(double) * z.size()), 0);
  for (const auto& t : traces) {
    ASSERT_EQ(t.points.size(), t.ell.size());
    ASSERT_EQ(t.point_stress.size(), t.ell.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < t.ell.size(); ++i) {
      EXPECT_TRUE(t.points[i].allFinite());
      EXPECT_DOUBLE_EQ(t.point_stress[i],
                       point_stress(t.points[i], axis_point(t.attribute, t.ell[i], 3), x, z,
                                    {Dissimilarity::manhattan, Dissimilarity::euclidean}));
      sum += t.point_stress[i];
    }
    EXPECT_NEAR(t.avg_stress, sum / static_cast<double>(t.ell.size()), 1e-12);
  }
}

TEST(TraceAxis, ParallelMatchesSequentialBitwise) {
  std::mt19937_64 rng(30);
  const Matrix x = random_matrix(rng, 12, 6);
  const Matrix z = fit_mds(x, Dissimilarity::euclidean, Dissimilarity::euclidean, 2).Z;
  const AxisGrid grid = AxisGrid::uniform(5.0, 0.1);
  const auto serial = trace_all_axes(grid, x, z, kEuc, {}, 1);
  const auto parallel = trace_all_axes(grid, x, z, kEuc, {}, 4);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t k = 0; k < serial.size(); ++k) {
    EXPECT_EQ(serial[k].attribute, parallel[k].attribute);
    EXPECT_EQ(serial[k].point_stress, parallel[k].point_stress);
    for (std::size_t i = 0; i < serial[k].points.size(); ++i) {
      EXPECT_EQ(serial[k].points[i], parallel[k].points[i]);
    }
    EXPECT_EQ(serial[k].avg_stress, parallel[k].avg_stress);
  }
}

TEST(TraceAxis, RestartsNeverWorsenPoints) {
  std::mt19937_64 rng(31);
  const Matrix x = random_matrix(rng, 10, 3);
  const Matrix z = fit_mds(x, Dissimilarity::manhattan, Dissimilarity::euclidean, 2).Z;
  const AxisKinds kinds{Dissimilarity::manhattan, Dissimilarity::euclidean};
  const AxisGrid grid = AxisGrid::uniform(2.0, 0.5);
  AxisSolveOptions with;
  with.restarts = 4;
  with.seed = 9;
  const AxisTrace plain = trace_axis(0, grid, x, z, kinds);
  const AxisTrace restarted = trace_axis(0, grid, x, z, kinds, with);
  EXPECT_EQ(trace_axis(0, grid, x, z, kinds, with).points, restarted.points);
  EXPECT_LE(restarted.point_stress.front(), plain.point_stress.front() + 1e-12);
}

TEST(PointStress, Examples) {
  Matrix x(1, 1), z(1, 1);
  x << 3.0;
  z << 0.0;
  const Vector a = Vector::Zero(1);
  const Vector b = (Vector(1) << 1.0).finished();
  // HD distance 3, LD distance 1: residual 2
  EXPECT_DOUBLE_EQ(point_stress(b, a, x, z, kEuc), 4.0);
  const Vector exact = (Vector(1) << 3.0).finished();
  EXPECT_EQ(point_stress(exact, a, x, z, kEuc), 0.0);
}

TEST(PointStress, MatchesStressRestrictedToAxisPairs) {
  // Append the axis point as an extra observation: the full stress over the
  // augmented set contains the axis pairs twice, plus the observation pairs
  // and the axis point's own diagonal term.
  std::mt19937_64 rng(32);
  const Matrix x = random_matrix(rng, 6, 3);
  const Matrix z = random_matrix(rng, 6, 2);
  const Vector a = axis_point(2, 1.3, 3);
  const Vector b = (Vector(2) << 0.1, 0.4).finished();
  Matrix xa(7, 3), zb(7, 2);
  xa << x, a.transpose();
  zb << z, b.transpose();
  for (auto kinds : {kEuc, kIp, AxisKinds{Dissimilarity::manhattan, Dissimilarity::euclidean}}) {
    const double full = stress(zb, xa, kinds.hd, kinds.ld);
    const double obs = stress(z, x, kinds.hd, kinds.ld);
    const double self = std::pow(delta(kinds.hd, a, a) - delta(kinds.ld, b, b), 2);
    EXPECT_NEAR(point_stress(b, a, x, z, kinds), 0.5 * (full - obs - self), 1e-10);
  }
}

TEST(AxisAvgStress, Examples) {
  AxisTrace t;
  t.point_stress = {3, 3, 3, 3};
  EXPECT_EQ(axis_avg_stress(t), 3.0);
  t.point_stress = {1, 2, 3, 4, 5};  // linear over a symmetric grid
  EXPECT_EQ(axis_avg_stress(t), 3.0);
  t.point_stress = {1, 2, 6};
  EXPECT_EQ(axis_avg_stress(t), 3.0);
  t.point_stress.clear();
  EXPECT_THROW(axis_avg_stress(t), std::invalid_argument);
}

TEST(PruneAxes, KeepAllAndKeepNone) {
  Embedding emb;
  emb.Z = Matrix::Ones(3, 2);
  std::vector<AxisTrace> traces = {make_trace(0, 1.0), make_trace(1, 5.0), make_trace(2, 3.0)};
  const BiplotScene all = prune_axes(emb, traces, PruneRule::keep_count(3));
  EXPECT_EQ(all.traces.size(), 3u);
  EXPECT_TRUE(all.removed.empty());
  const BiplotScene none = prune_axes(emb, traces, PruneRule::keep_count(0));
  EXPECT_TRUE(none.traces.empty());
  ASSERT_EQ(none.removed.size(), 3u);
  EXPECT_EQ(none.removed[0].attribute, 1);
  EXPECT_EQ(none.removed[1].attribute, 2);
  EXPECT_EQ(none.removed[2].attribute, 0);
  EXPECT_EQ(none.embedding.Z, emb.Z);
}

TEST(PruneAxes, KeepRemovesHighestStressAndBreaksTiesByIndex) {
  Embedding emb;
  emb.Z = Matrix::Zero(2, 2);
  std::vector<AxisTrace> traces = {make_trace(0, 2.0), make_trace(1, 7.0), make_trace(2, 2.0),
                                   make_trace(3, 1.0)};
  const BiplotScene s = prune_axes(emb, traces, PruneRule::keep_count(2));
  ASSERT_EQ(s.removed.size(), 2u);
  EXPECT_EQ(s.removed[0].attribute, 1);
  EXPECT_EQ(s.removed[1].attribute, 2);  // tie with attribute 0: higher index goes
  ASSERT_EQ(s.traces.size(), 2u);
  EXPECT_EQ(s.traces[0].attribute, 0);
  EXPECT_EQ(s.traces[1].attribute, 3);
}

TEST(PruneAxes, Threshold) {
  Embedding emb;
  emb.Z = Matrix::Zero(2, 2);
  std::vector<AxisTrace> traces = {make_trace(0, 2.0), make_trace(1, 7.0), make_trace(2, 2.5)};
  const BiplotScene s = prune_axes(emb, traces, PruneRule::above(2.2));
  ASSERT_EQ(s.removed.size(), 2u);
  EXPECT_EQ(s.removed[0].attribute, 1);
  EXPECT_EQ(s.removed[1].attribute, 2);
  EXPECT_EQ(s.traces.size(), 1u);
}

TEST(PruneAxes, InvalidRules) {
  Embedding emb;
  std::vector<AxisTrace> traces = {make_trace(0, 1.0)};
  EXPECT_THROW(prune_axes(emb, traces, PruneRule::keep_count(2)), std::invalid_argument);
  EXPECT_THROW(prune_axes(emb, traces, PruneRule::keep_count(-1)), std::invalid_argument);
  EXPECT_THROW(prune_axes(emb, traces, PruneRule{}), std::invalid_argument);
  EXPECT_THROW(prune_axes(emb, traces, PruneRule{1, 2.0}), std::invalid_argument);
}

TEST(ClosedFormAxisIp, Examples) {
  Matrix v1(3, 2);
  v1 << 0.6, 0.8, -0.8, 0.6, 0.0, 0.0;
  EXPECT_EQ(closed_form_axis_ip(1, 1.0, v1), v1.row(1).transpose());
  EXPECT_TRUE(closed_form_axis_ip(0, 0.0, v1).isZero());
  EXPECT_EQ(closed_form_axis_ip(0, -2.0, v1), -closed_form_axis_ip(0, 2.0, v1));
}
