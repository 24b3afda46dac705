#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mdsbiplot/mds.hpp"
#include "test_support.hpp"

using namespace mdsbiplot;
using mdsbiplot::testing::central_difference;
using mdsbiplot::testing::random_centered;
using mdsbiplot::testing::random_matrix;
using mdsbiplot::testing::relative_error;
using mdsbiplot::testing::signed_column_distance;

namespace {

Matrix unit_square() {
  Matrix x(4, 2);
  x << 0, 0, 1, 0, 1, 1, 0, 1;
  return x;
}

// Independent double loop over every ordered pair.
double stress_oracle(const Matrix& z, const Matrix& x, Dissimilarity hd, Dissimilarity ld) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      const double r = delta(hd, x.row(i), x.row(j)) - delta(ld, z.row(i), z.row(j));
      s += r * r;
    }
  return s;
}

}  // namespace

TEST(Stress, PerfectEmbeddingIsZero) {
  const Matrix x = unit_square();
  EXPECT_EQ(stress(x, x, Dissimilarity::euclidean, Dissimilarity::euclidean), 0.0);
  std::mt19937_64 rng(1);
  const Matrix y = random_matrix(rng, 6, 3);
  EXPECT_NEAR(stress(y, y, Dissimilarity::inner_product, Dissimilarity::inner_product), 0.0,
              1e-24);
}

TEST(Stress, TwoPointsCountsBothOrders) {
  Matrix x(2, 1), z(2, 1);
  x << 0, 5;
  z << 0, 3;
  EXPECT_DOUBLE_EQ(stress(z, x, Dissimilarity::euclidean, Dissimilarity::euclidean), 8.0);
}

TEST(Stress, MatchesDoubleLoopOracle) {
  std::mt19937_64 rng(2);
  for (auto hd : kAllDissimilarities) {
    const Matrix x = random_matrix(rng, 7, 3, 0.1, 2.0);
    const Matrix z = random_matrix(rng, 7, 2, 0.1, 2.0);
    for (auto ld : kAllDissimilarities) {
      EXPECT_NEAR(stress(z, x, hd, ld), stress_oracle(z, x, hd, ld),
                  1e-10 * (1.0 + stress_oracle(z, x, hd, ld)));
    }
  }
}

TEST(StressGradient, TwoPointSquaredEuclideanClosedForm) {
  Matrix x(2, 2), z(2, 2);
  x << 0, 0, 1, 2;
  z << 0.3, -0.1, 0.5, 0.4;
  const Matrix g = stress_gradient(z, x, Dissimilarity::squared_euclidean,
                                   Dissimilarity::squared_euclidean);
  const double hd = 5.0;
  const double ld = (z.row(0) - z.row(1)).squaredNorm();
  // f = 2 (hd - ld)^2  =>  df/dz_1 = -2 * 2 (hd - ld) * 2 (z_1 - z_2)
  const Eigen::RowVectorXd g0 = -2.0 * 2.0 * (hd - ld) * 2.0 * (z.row(0) - z.row(1));
  EXPECT_TRUE(g.row(0).isApprox(g0, 1e-12));
  EXPECT_TRUE(g.row(1).isApprox(-g0, 1e-12));
}

TEST(StressGradient, ZeroAtPerfectFit) {
  const Matrix x = unit_square();
  EXPECT_LT(stress_gradient(x, x, Dissimilarity::euclidean, Dissimilarity::euclidean)
                .cwiseAbs()
                .maxCoeff(),
            1e-6);
}

TEST(StressGradient, DoublingHdRescalesResiduals) {
  std::mt19937_64 rng(12);
  const Matrix x = random_matrix(rng, 5, 3);
  const Matrix z = random_matrix(rng, 5, 2);
  const Matrix hd = pairwise(Dissimilarity::euclidean, x);
  for (const Matrix& h : {hd, Matrix(2.0 * hd)}) {
    const Matrix analytic =
        stress_gradient_from_dissimilarities(z, h, Dissimilarity::euclidean);
    const Matrix fd = central_difference(
        [&](const Matrix& v) {
          return stress_from_dissimilarities(v, h, Dissimilarity::euclidean);
        },
        z);
    EXPECT_LT(relative_error(analytic, fd), 1e-4);
  }
}

TEST(StressGradient, PropertyMatchesFiniteDifferences) {
  std::mt19937_64 rng(31337);
  const std::array<Dissimilarity, 6> ld_kinds = {
      Dissimilarity::euclidean,     Dissimilarity::manhattan,
      Dissimilarity::squared_euclidean, Dissimilarity::cosine,
      Dissimilarity::inner_product, Dissimilarity::sqrt_manhattan};
  for (auto ld : ld_kinds) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto hd = kAllDissimilarities[static_cast<std::size_t>(trial) % kAllDissimilarities.size()];
      const Matrix x = random_matrix(rng, 6, 3, 0.1, 2.0);
      const Matrix z = random_matrix(rng, 6, 2, -2.0, 2.0);
      const Matrix analytic = stress_gradient(z, x, hd, ld);
      const Matrix fd = central_difference(
          [&](const Matrix& v) { return stress(v, x, hd, ld); }, z);
      EXPECT_LT(relative_error(analytic, fd), 1e-4) << to_string(hd) << "/" << to_string(ld);
    }
  }
}

TEST(ClassicalMds, TwoPoints) {
  Matrix d(2, 2);
  d << 0, 2, 2, 0;
  const Matrix z = classical_mds(d, 1);
  EXPECT_NEAR(std::abs(z(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(z(0, 0), -z(1, 0), 1e-12);
}

TEST(ClassicalMds, CollinearPoints) {
  Matrix d(3, 3);
  d << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  Matrix expect(3, 1);
  expect << -1, 0, 1;
  EXPECT_LT(signed_column_distance(classical_mds(d, 1), expect), 1e-12);
}

TEST(ClassicalMds, ReproducesEuclideanDistances) {
  std::mt19937_64 rng(5);
  const Matrix x = random_centered(rng, 9, 3);
  const Matrix d = pairwise(Dissimilarity::euclidean, x);
  const Matrix z = classical_mds(d, 3);
  EXPECT_LT((pairwise(Dissimilarity::euclidean, z) - d).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(ClassicalMds, TooManyDimensionsListsSpectrum) {
  Matrix d(3, 3);
  d << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  try {
    classical_mds(d, 2);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("spectrum"), std::string::npos);
  }
}

TEST(ClassicalMds, EqualsPcaUpToSign) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = random_centered(rng, 12, 4);
    const Matrix a = classical_mds(pairwise(Dissimilarity::euclidean, x), 2);
    const Matrix b = pca_project(x, 2);
    EXPECT_LT(signed_column_distance(a, b), 1e-6);
  }
}

TEST(PcaProject, OrthogonalColumnsAreAlreadyPrincipal) {
  Matrix x(4, 2);
  x << 3, 1, -3, 1, 3, -1, -3, -1;
  EXPECT_LT(signed_column_distance(pca_project(x, 2), x), 1e-12);
}

TEST(PcaProject, FullRankReconstructionAndUncorrelatedScores) {
  std::mt19937_64 rng(7);
  const Matrix x = random_centered(rng, 20, 4);
  const SvdResult svd = svd_thin(x);
  const Matrix scores = pca_project(x, 4);
  EXPECT_LT((scores * svd.V.transpose() - x).cwiseAbs().maxCoeff(), 1e-8);
  const Matrix cov = scores.transpose() * scores / 19.0;
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(cov(i, i), svd.singular_values(i) * svd.singular_values(i) / 19.0, 1e-10);
    if (i > 0) {
      EXPECT_GE(cov(i - 1, i - 1), cov(i, i));
    }
    for (Eigen::Index j = 0; j < 4; ++j) {
      if (i != j) {
        EXPECT_LT(std::abs(cov(i, j)), 1e-8);
      }
    }
  }
}

TEST(PcaProject, ProportionOfVariance) {
  Matrix x(4, 2);
  x << 3, 1, -3, 1, 3, -1, -3, -1;
  // eigenvalues of X'X are 36 and 4
  EXPECT_DOUBLE_EQ(proportion_of_variance(x, 1), 0.9);
  EXPECT_DOUBLE_EQ(proportion_of_variance(x, 2), 1.0);
}

TEST(FitMds, ExactEmbeddingAtInitialization) {
  std::mt19937_64 rng(9);
  const Matrix x = random_centered(rng, 8, 2);
  const Embedding e = fit_mds(x, Dissimilarity::euclidean, Dissimilarity::euclidean, 2);
  EXPECT_LT(e.stress_trace.front(), 1e-10);
  EXPECT_LT(e.final_stress, 1e-10);
  EXPECT_TRUE(e.converged);
}

TEST(FitMds, UnitSquareFromRandomStart) {
  FitOptions opts;
  opts.init = InitMode::random;
  opts.seed = 3;
  opts.max_iterations = 20000;
  opts.tolerance = 1e-14;
  const Embedding e =
      fit_mds(unit_square(), Dissimilarity::euclidean, Dissimilarity::euclidean, 2, opts);
  EXPECT_LT(e.final_stress, 1e-8);
}

TEST(FitMds, InnerProductMatchesPcaGram) {
  std::mt19937_64 rng(10);
  const Matrix x = random_centered(rng, 10, 4);
  const SvdResult svd = svd_thin(x);
  const Matrix target = svd.U.leftCols(2) *
                        svd.singular_values.head(2).cwiseAbs2().asDiagonal() *
                        svd.U.leftCols(2).transpose();
  for (auto init : {InitMode::classical, InitMode::random}) {
    FitOptions opts;
    opts.init = init;
    opts.max_iterations = 50000;
    opts.tolerance = 1e-15;
    const Embedding e =
        fit_mds(x, Dissimilarity::inner_product, Dissimilarity::inner_product, 2, opts);
    EXPECT_LT((e.Z * e.Z.transpose() - target).norm(), 1e-5) << to_string(init);
  }
}

TEST(FitMds, FinalStressIsRecomputable) {
  std::mt19937_64 rng(11);
  const Matrix x = random_matrix(rng, 10, 4);
  const Embedding e = fit_mds(x, Dissimilarity::manhattan, Dissimilarity::euclidean, 2);
  const double again = stress(e.Z, x, Dissimilarity::manhattan, Dissimilarity::euclidean);
  EXPECT_NEAR(e.final_stress, again, 1e-9 * again);
  EXPECT_EQ(e.stress_trace.back(), e.final_stress);
}

TEST(FitMds, PropertyDescentForEveryMetricPair) {
  // LD clark is excluded: it needs positive coordinates, which a free
  // embedding does not keep.
  std::mt19937_64 rng(2718);
  for (auto hd : kAllDissimilarities) {
    for (auto ld : kAllDissimilarities) {
      if (ld == Dissimilarity::clark) continue;
      for (int trial = 0; trial < 20; ++trial) {
        const Matrix x = random_matrix(rng, 6, 3, 0.1, 2.0);
        FitOptions opts;
        opts.init = trial % 2 ? InitMode::random : InitMode::classical;
        opts.seed = static_cast<std::uint64_t>(trial);
        opts.max_iterations = 200;
        const Embedding e = fit_mds(x, hd, ld, 2, opts);
        for (std::size_t i = 1; i < e.stress_trace.size(); ++i) {
          ASSERT_LE(e.stress_trace[i], e.stress_trace[i - 1])
              << to_string(hd) << "/" << to_string(ld) << " trial " << trial;
        }
        EXPECT_TRUE(e.Z.allFinite());
      }
    }
  }
}

TEST(FitMds, FixedStepRuleStillDescends) {
  std::mt19937_64 rng(13);
  const Matrix x = random_matrix(rng, 8, 3);
  FitOptions opts;
  opts.step_rule = StepRule::fixed;
  opts.fixed_step = 1e-2;
  opts.init = InitMode::random;
  opts.max_iterations = 500;
  const Embedding e = fit_mds(x, Dissimilarity::euclidean, Dissimilarity::euclidean, 2, opts);
  EXPECT_LT(e.final_stress, e.stress_trace.front());
  for (std::size_t i = 1; i < e.stress_trace.size(); ++i) {
    EXPECT_LE(e.stress_trace[i], e.stress_trace[i - 1]);
  }
}

TEST(FitMds, RestartsKeepLowestStress) {
  std::mt19937_64 rng(14);
  const Matrix x = random_matrix(rng, 9, 4);
  FitOptions base;
  base.init = InitMode::random;
  base.seed = 100;
  double lowest = fit_mds(x, Dissimilarity::manhattan, Dissimilarity::euclidean, 2, base).final_stress;
  for (std::uint64_t s = 101; s <= 103; ++s) {
    FitOptions o = base;
    o.seed = s;
    lowest = std::min(lowest, fit_mds(x, Dissimilarity::manhattan, Dissimilarity::euclidean, 2, o).final_stress);
  }
  FitOptions with = base;
  with.restarts = 3;
  const Embedding e = fit_mds(x, Dissimilarity::manhattan, Dissimilarity::euclidean, 2, with);
  EXPECT_EQ(e.final_stress, lowest);
}

TEST(FitMds, ConvergedFlagFollowsIterationBudget) {
  std::mt19937_64 rng(15);
  const Matrix x = random_matrix(rng, 10, 4);
  FitOptions tight;
  tight.max_iterations = 1;
  tight.init = InitMode::random;
  EXPECT_FALSE(fit_mds(x, Dissimilarity::euclidean, Dissimilarity::euclidean, 2, tight).converged);
  FitOptions loose;
  loose.max_iterations = 100000;
  EXPECT_TRUE(fit_mds(x, Dissimilarity::euclidean, Dissimilarity::euclidean, 2, loose).converged);
}

TEST(FitMds, RejectsBadOptions) {
  const Matrix x = unit_square();
  FitOptions bad;
  bad.tolerance = 0.0;
  EXPECT_THROW(fit_mds(x, Dissimilarity::euclidean, Dissimilarity::euclidean, 2, bad),
               std::invalid_argument);
  bad = {};
  bad.max_iterations = 0;
  EXPECT_THROW(fit_mds(x, Dissimilarity::euclidean, Dissimilarity::euclidean, 2, bad),
               std::invalid_argument);
}
