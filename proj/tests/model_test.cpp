#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "peloton/errors.hpp"
#include "peloton/model.hpp"
#include "peloton/random.hpp"

namespace peloton {
namespace {

using testing::make_embeddings;
using testing::random_matrix;

Matrix row_vector(std::initializer_list<double> values) {
  Matrix m(1, static_cast<Eigen::Index>(values.size()));
  Eigen::Index j = 0;
  for (double v : values) m(0, j++) = v;
  return m;
}

TEST(Predict, ClosedForms) {
  const std::vector<double> zero = {0.0, 0.0};
  EXPECT_EQ(predict(zero, zero), 0.5);
  const std::vector<double> r = {std::log(3.0)}, s = {1.0}, neg = {-1.0};
  EXPECT_NEAR(predict(r, s), 0.75, 1e-15);
  EXPECT_NEAR(predict(r, neg), 0.25, 1e-15);
}

TEST(Predict, StaysInsideOpenInterval) {
  for (double x : {-1e3, -750.0, -40.0, 0.0, 40.0, 750.0, 1e3, 1e300, -1e300}) {
    const std::vector<double> r = {x}, s = {1.0};
    const double p = predict(r, s);
    EXPECT_GT(p, 0.0) << x;
    EXPECT_LT(p, 1.0) << x;
    EXPECT_TRUE(std::isfinite(p));
  }
}

TEST(Predict, SymmetryProperty) {
  SeededRandom rng(3);
  for (int i = 0; i < 200; ++i) {
    const double x = 40.0 * (rng.uniform() - 0.5);
    EXPECT_NEAR(sigmoid(-x), 1.0 - sigmoid(x), 1e-15);
  }
}

TEST(Predict, DimensionMismatchIsContractError) {
  const std::vector<double> a = {1.0, 2.0}, b = {1.0};
  EXPECT_THROW(predict(a, b), ContractError);
}

TEST(Loss, ConfidentCorrectPredictionApproachesZero) {
  const auto e = make_embeddings(row_vector({30.0}), row_vector({30.0}));
  const std::vector<TrainingExample> ex = {{0, 0, 1.0}};
  EXPECT_LT(loss(e, ex), 1e-11);
  EXPECT_GE(loss(e, ex), 0.0);
}

TEST(Loss, ZeroEmbeddingsGiveLn2) {
  const auto e = make_embeddings(Matrix::Zero(2, 3), Matrix::Zero(2, 3));
  for (double y : {0.0, 0.3, 1.0}) {
    const std::vector<TrainingExample> ex = {{0, 1, y}};
    EXPECT_NEAR(loss(e, ex), std::log(2.0), 1e-15);
  }
  const std::vector<TrainingExample> two = {{0, 0, 1.0}, {1, 1, 0.0}};
  EXPECT_NEAR(loss(e, two), 0.693147, 1e-6);
}

TEST(Loss, ClampKeepsSaturatedLossFinite) {
  const auto e = make_embeddings(row_vector({1e3}), row_vector({1.0}));
  const std::vector<TrainingExample> ex = {{0, 0, 0.0}};
  const double l = loss(e, ex);
  EXPECT_TRUE(std::isfinite(l));
  EXPECT_NEAR(l, -std::log(kProbabilityFloor), 1e-3);
}

TEST(Loss, OutOfRangeIndexIsContractError) {
  const auto e = make_embeddings(Matrix::Zero(2, 2), Matrix::Zero(1, 2));
  const std::vector<TrainingExample> bad_rider = {{2, 0, 1.0}};
  const std::vector<TrainingExample> bad_race = {{0, 1, 1.0}};
  EXPECT_THROW(loss(e, bad_rider), ContractError);
  EXPECT_THROW(loss_gradients(e, bad_race), ContractError);
}

TEST(Loss, EqualsEntropyWhenPredictionsMatchTargets) {
  // One rider with r = 1 and races whose embedding is logit(y) give p = y.
  const std::vector<double> targets = {0.1, 0.35, 0.5, 0.8, 0.97};
  Matrix races(static_cast<Eigen::Index>(targets.size()), 1);
  std::vector<TrainingExample> ex;
  double entropy = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double y = targets[i];
    races(static_cast<Eigen::Index>(i), 0) = std::log(y / (1 - y));
    ex.push_back({0, i, y});
    entropy -= y * std::log(y) + (1 - y) * std::log(1 - y);
  }
  entropy /= static_cast<double>(targets.size());
  const auto e = make_embeddings(row_vector({1.0}), races);
  EXPECT_NEAR(loss(e, ex), entropy, 1e-12);

  // And it is a minimum: perturbing any race raises the loss.
  for (Eigen::Index i = 0; i < races.rows(); ++i) {
    for (double delta : {-1e-3, 1e-3}) {
      auto moved = e;
      moved.races(i, 0) += delta;
      EXPECT_GT(loss(moved, ex), loss(e, ex));
    }
  }
}

TEST(Loss, MatchesIndependentReference) {
  const auto e = make_embeddings(random_matrix(4, 3, 1), random_matrix(3, 3, 2));
  const std::vector<TrainingExample> ex = {{0, 0, 1.0}, {1, 2, 0.25}, {3, 1, 0.0}, {2, 2, 0.6}};
  EXPECT_NEAR(loss(e, ex), testing::reference_loss(testing::to_rows(e.riders),
                                                   testing::to_rows(e.races), ex),
              1e-14);
}

TEST(LossGradients, StationaryAtMatchedTargets) {
  const auto e = make_embeddings(Matrix::Zero(2, 3), Matrix::Zero(2, 3));
  const std::vector<TrainingExample> ex = {{0, 0, 0.5}, {1, 1, 0.5}, {0, 1, 0.5}};
  const auto g = loss_gradients(e, ex);
  EXPECT_TRUE(g.riders.isZero(0.0));
  EXPECT_TRUE(g.races.isZero(0.0));
}

TEST(LossGradients, ZeroRiderVector) {
  const Matrix s = row_vector({0.4, -1.2, 2.0});
  const auto e = make_embeddings(Matrix::Zero(1, 3), s);
  const std::vector<TrainingExample> ex = {{0, 0, 1.0}};
  const auto g = loss_gradients(e, ex);
  EXPECT_TRUE(g.riders.isApprox(-0.5 * s, 1e-15));
  EXPECT_TRUE(g.races.isZero(0.0));
}

TEST(LossGradients, AccumulateOverRepeatedEntities) {
  const auto e = make_embeddings(row_vector({0.0}), row_vector({2.0}));
  const std::vector<TrainingExample> once = {{0, 0, 1.0}};
  const std::vector<TrainingExample> twice = {{0, 0, 1.0}, {0, 0, 0.0}};
  // (0.5 - 1) * 2 / 1 and ((0.5 - 1) + (0.5 - 0)) * 2 / 2
  EXPECT_DOUBLE_EQ(loss_gradients(e, once).riders(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(loss_gradients(e, twice).riders(0, 0), 0.0);
}

TEST(LossGradients, MatchesFiniteDifferences) {
  // 3 riders, 2 races, D = 2, 5 examples.
  const auto e = make_embeddings(random_matrix(3, 2, 21, 0.8), random_matrix(2, 2, 22, 0.8));
  const std::vector<TrainingExample> ex = {
      {0, 0, 1.0}, {1, 0, 0.4}, {2, 1, 0.0}, {0, 1, 0.75}, {1, 1, 1.0}};
  const auto g = loss_gradients(e, ex);
  const auto [fr, fs] = testing::finite_difference_gradients(testing::to_rows(e.riders),
                                                             testing::to_rows(e.races), ex, 1e-5);
  EXPECT_LE(testing::max_relative_error(testing::to_rows(g.riders), fr, 1e-8), 1e-4);
  EXPECT_LE(testing::max_relative_error(testing::to_rows(g.races), fs, 1e-8), 1e-4);
}

TEST(LossGradients, LossAndGradientsAgreeWithSeparateCalls) {
  const auto e = make_embeddings(random_matrix(5, 4, 7), random_matrix(6, 4, 8));
  std::vector<TrainingExample> ex;
  SeededRandom rng(9);
  for (int i = 0; i < 40; ++i) ex.push_back({rng.below(5), rng.below(6), rng.uniform()});
  Gradients g;
  const double l = loss_and_gradients(e, ex, g);
  EXPECT_EQ(l, loss(e, ex));
  const auto separate = loss_gradients(e, ex);
  EXPECT_EQ(g.riders, separate.riders);
  EXPECT_EQ(g.races, separate.races);
}

TEST(Loss, BilinearSymmetryProperty) {
  SeededRandom rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n_r = 1 + rng.below(5), n_s = 1 + rng.below(5), d = 1 + rng.below(4);
    const Matrix r = random_matrix(n_r, d, 100 + trial), s = random_matrix(n_s, d, 200 + trial);
    std::vector<TrainingExample> ex, transposed;
    for (int i = 0; i < 10; ++i) {
      const auto a = rng.below(n_r), b = rng.below(n_s);
      const double y = rng.uniform();
      ex.push_back({a, b, y});
      transposed.push_back({b, a, y});
    }
    EXPECT_NEAR(loss(make_embeddings(r, s), ex), loss(make_embeddings(s, r), transposed), 1e-15);
    EXPECT_GE(loss(make_embeddings(r, s), ex), 0.0);
  }
}

TEST(EmbeddingSet, ValidateChecksShapesAndFiniteness) {
  auto e = make_embeddings(Matrix::Zero(2, 3), Matrix::Zero(1, 3));
  EXPECT_NO_THROW(e.validate());
  e.races(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(e.validate(), ContractError);
  auto wrong_rows = make_embeddings(Matrix::Zero(2, 3), Matrix::Zero(1, 3));
  wrong_rows.riders = Matrix::Zero(3, 3);
  EXPECT_THROW(wrong_rows.validate(), ContractError);
  auto wrong_dim = make_embeddings(Matrix::Zero(2, 3), Matrix::Zero(1, 2));
  EXPECT_THROW(wrong_dim.validate(), ContractError);
}

}  // namespace
}  // namespace peloton
