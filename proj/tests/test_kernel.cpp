#include "support.hpp"

#include "pivchol/errors.hpp"

#include <gtest/gtest.h>

using namespace pivchol;
using namespace pivchol::testing;

TEST(KernelEval, ZeroDistanceGivesSignalVariance) {
  const auto c = kernel(3, 2.7, 0.4, 0.0);
  const Eigen::Vector3d x(0.3, -1.0, 2.0);
  EXPECT_EQ(kernel_eval(x, x, c), 2.7);
}

TEST(KernelEval, HalfAtLogTwoDistance) {
  const auto c = kernel(1, 1.0, 1.0, 0.0);
  Eigen::VectorXd a(1), b(1);
  a << 0.0;
  b << std::sqrt(2.0 * std::log(2.0));
  EXPECT_NEAR(kernel_eval(a, b, c), 0.5, 1e-15);
}

TEST(KernelEval, LinearInSignalVariance) {
  const Eigen::Vector2d a(0.1, 0.7), b(-0.4, 0.2);
  const double one = kernel_eval(a, b, kernel(2, 1.0, 1.0, 0.0));
  const double two = kernel_eval(a, b, kernel(2, 2.0, 1.0, 0.0));
  EXPECT_EQ(two, 2.0 * one);
}

TEST(KernelEval, ArdLengthscalesScalePerDimension) {
  KernelConfig c = kernel(2, 1.0, 1.0, 0.0);
  c.lengthscales << 2.0, 0.5;
  const Eigen::Vector2d a(0.0, 0.0), b(2.0, 0.5);
  // (2/2)^2 + (0.5/0.5)^2 = 2
  EXPECT_NEAR(kernel_eval(a, b, c), std::exp(-1.0), 1e-15);
}

TEST(KernelEval, DimensionMismatchThrows) {
  const auto c = kernel(2, 1.0, 1.0, 0.0);
  const Eigen::Vector3d a(0, 0, 0);
  EXPECT_THROW(kernel_eval(a, a, c), ContractViolation);
}

TEST(KernelConfigTest, IsotropicDefaultsJitterToTinyMultipleOfTheta) {
  const auto c = KernelConfig::isotropic(2, 3.0, 1.0, 0.1);
  EXPECT_DOUBLE_EQ(c.jitter, 3e-10);
  EXPECT_EQ(c.lengthscales.size(), 2);
}

TEST(KernelConfigTest, RejectsBadHyperparameters) {
  EXPECT_THROW(kernel(1, 0.0, 1.0, 0.0).validate(1), ContractViolation);
  EXPECT_THROW(kernel(1, 1.0, -1.0, 0.0).validate(1), ContractViolation);
  EXPECT_THROW(kernel(1, 1.0, 1.0, -0.1).validate(1), ContractViolation);
  EXPECT_THROW(kernel(2, 1.0, 1.0, 0.0).validate(3), ContractViolation);
}

TEST(DatasetTest, ValidateRejectsNonFiniteAndMismatch) {
  Dataset d = random_dataset(4, 2, 1);
  EXPECT_NO_THROW(d.validate());
  d.X(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(d.validate(), ContractViolation);
  Dataset e = random_dataset(4, 2, 1);
  e.y.resize(3);
  EXPECT_THROW(e.validate(), ContractViolation);
}

TEST(GramEntry, DiagonalIsThetaInLatentMode) {
  const auto data = random_dataset(5, 2, 3);
  const auto op = make_op(data, kernel(2, 1.7, 0.8, 0.3), GramMode::Latent);
  for (Index i = 0; i < 5; ++i) EXPECT_EQ(op.entry(i, i), 1.7);
}

TEST(GramEntry, NoisyModeAddsNoiseOnDiagonalOnly) {
  const auto data = random_dataset(5, 2, 3);
  const auto c = kernel(2, 1.0, 0.8, 0.1);
  const auto g = make_op(data, c, GramMode::Noisy);
  const auto k = g.with_mode(GramMode::Latent);
  EXPECT_DOUBLE_EQ(g.entry(2, 2), 1.1);
  EXPECT_EQ(g.entry(1, 3), k.entry(1, 3));
  EXPECT_DOUBLE_EQ(g.diagonal_shift(), 0.1);
  EXPECT_EQ(k.diagonal_shift(), 0.0);
}

TEST(GramEntry, OutOfRangeThrows) {
  const auto op = make_op(random_dataset(3, 1, 0), kernel(1, 1, 1, 0));
  EXPECT_THROW(op.entry(3, 0), ContractViolation);
  EXPECT_THROW(op.row(-1), ContractViolation);
}

TEST(GramEntry, SymmetricAndBounded) {
  const auto data = random_dataset(30, 3, 4);
  const auto op = make_op(data, kernel(3, 2.0, 0.7, 0.0), GramMode::Latent);
  for (Index i = 0; i < 30; ++i) {
    for (Index j = 0; j < 30; ++j) {
      EXPECT_EQ(op.entry(i, j), op.entry(j, i));
      EXPECT_GE(op.entry(i, j), 0.0);
      EXPECT_LE(op.entry(i, j), 2.0);
    }
  }
}

TEST(GramRow, MatchesDenseOracleExactly) {
  const auto data = random_dataset(30, 2, 5);
  const auto c = kernel(2, 1.3, 0.9, 0.05, 0.0);
  const Eigen::MatrixXd g = dense_noisy(data, c);
  for (bool cache : {false, true}) {
    const auto op = make_op(data, c, GramMode::Noisy, cache);
    for (Index i = 0; i < 30; ++i) {
      const Eigen::VectorXd row = op.row(i);
      EXPECT_EQ(row[i], op.entry(i, i));
      EXPECT_LE((row - g.row(i).transpose()).lpNorm<Eigen::Infinity>(), 1e-15);
    }
  }
}

TEST(GramRow, SinglePoint) {
  const auto op = make_op(random_dataset(1, 1, 0), kernel(1, 2.0, 1.0, 0.5, 0.0));
  const Eigen::VectorXd row = op.row(0);
  ASSERT_EQ(row.size(), 1);
  EXPECT_EQ(row[0], op.entry(0, 0));
}

TEST(GramMvp, ZeroVectorGivesZero) {
  const auto op = make_op(random_dataset(10, 2, 0), kernel(2, 1, 1, 0.1));
  EXPECT_EQ(op.mvp(Eigen::VectorXd::Zero(10)).norm(), 0.0);
}

TEST(GramMvp, SinglePointLatent) {
  const auto op = make_op(random_dataset(1, 2, 0), kernel(2, 3.0, 1, 0.1), GramMode::Latent);
  Eigen::VectorXd v(1);
  v << 2.5;
  EXPECT_DOUBLE_EQ(op.mvp(v)[0], 7.5);
}

TEST(GramMvp, MatchesDenseProductBothPaths) {
  const auto data = random_dataset(50, 3, 6);
  const auto c = kernel(3, 1.0, 1.2, 0.01);
  const Eigen::MatrixXd g = dense_noisy(data, c);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(50);
  for (auto& x : v) x = normal(rng);
  for (bool cache : {false, true}) {
    const auto op = make_op(data, c, GramMode::Noisy, cache);
    EXPECT_LE(rel_inf(op.mvp(v), g * v), 1e-12);
  }
}

TEST(GramMvp, UnitVectorsGiveRows) {
  const auto data = random_dataset(12, 2, 7);
  const auto op = make_op(data, kernel(2, 1, 1, 0.2));
  for (Index i = 0; i < 12; ++i) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(12, i);
    EXPECT_LE((op.mvp(e) - op.row(i)).lpNorm<Eigen::Infinity>(), 1e-15);
  }
}

TEST(GramMvp, BitIdenticalAcrossThreadCounts) {
  const auto data = random_dataset(203, 2, 8);
  const auto c = kernel(2, 1, 0.5, 0.01);
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(203, -1.0, 2.0);
  Eigen::VectorXd reference;
  for (unsigned threads : {1u, 2u, 3u, 7u}) {
    GramOptions options;
    options.threads = threads;
    const GramOperator op(std::make_shared<const Dataset>(data), c, GramMode::Noisy, options);
    const Eigen::VectorXd out = op.mvp(v);
    if (threads == 1) {
      reference = out;
    } else {
      EXPECT_TRUE(out == reference) << "threads=" << threads;
    }
  }
}

TEST(GramMvp, LengthMismatchThrows) {
  const auto op = make_op(random_dataset(5, 1, 0), kernel(1, 1, 1, 0));
  EXPECT_THROW(op.mvp(Eigen::VectorXd::Zero(4)), ContractViolation);
}

TEST(GramOperatorTest, DenseCacheAboveCapIsRejected) {
  GramOptions options;
  options.dense_cache = true;
  options.dense_cache_cap = 10;
  EXPECT_THROW(GramOperator(std::make_shared<const Dataset>(random_dataset(11, 1, 0)),
                            kernel(1, 1, 1, 0), GramMode::Noisy, options),
               ContractViolation);
}

TEST(GramOperatorTest, CacheDoesNotChangeEntries) {
  const auto data = random_dataset(40, 2, 10);
  const auto c = kernel(2, 1.1, 0.6, 0.02);
  const auto plain = make_op(data, c, GramMode::Noisy, false);
  const auto cached = make_op(data, c, GramMode::Noisy, true);
  EXPECT_TRUE(cached.cached());
  EXPECT_TRUE(plain.dense() == cached.dense());
}

TEST(GramOperatorTest, NoisyGramIsPositiveDefinite) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto data = random_dataset(200, 2, seed, 0.3);
    const auto op = make_op(data, KernelConfig::isotropic(2, 1.0, 1.0, 0.0));  // jitter only
    Eigen::LLT<Eigen::MatrixXd> llt(op.dense());
    EXPECT_EQ(llt.info(), Eigen::Success) << "seed " << seed;
  }
}

TEST(GramOperatorTest, FromMatrixWrapsExplicitKernel) {
  Eigen::MatrixXd k(2, 2);
  k << 2.0, 0.5, 0.5, 1.0;
  const auto latent = GramOperator::from_matrix(k, 0.25, GramMode::Latent);
  const auto noisy = latent.with_mode(GramMode::Noisy);
  EXPECT_EQ(latent.scale(), 2.0);
  EXPECT_EQ(latent.entry(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(noisy.entry(1, 1), 1.25);
}
