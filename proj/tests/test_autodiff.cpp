// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "tsa/autodiff.hpp"
#include "tsa/error.hpp"
#include "tsa/ops.hpp"
#include "tsa/optimizer.hpp"

namespace tsa {
namespace {

using ad::Tensor2D;
using testing::check_gradients;

Tensor2D random_tensor(std::size_t c, std::size_t t, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor2D out(c, t);
  for (double& v : out.values()) v = dist(rng);
  return out;
}

TEST(Tensor, RejectsBadShapes) {
  EXPECT_THROW(Tensor2D(0, 3), ShapeError);
  EXPECT_THROW(Tensor2D(2, 0), ShapeError);
  EXPECT_THROW(Tensor2D(2, 2, std::vector<double>(3)), ShapeError);
  Tensor2D t(2, 3, 1.5);
  EXPECT_EQ(t.values().size(), 6u);
  EXPECT_DOUBLE_EQ(t(1, 2), 1.5);
}

TEST(Conv, MatchesNaiveLoopBitwise) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    std::mt19937 rng(seed);
    const std::size_t c_in = 1 + rng() % 6, c_out = 1 + rng() % 6, T = 1 + rng() % 40;
    const std::size_t kernel = 1 + 2 * (rng() % 3), dilation = 1 + rng() % 7;
    Tensor2D x = random_tensor(c_in, T, seed);
    Tensor2D w = random_tensor(1, c_out * c_in * kernel, seed + 100);
    Tensor2D b = random_tensor(1, c_out, seed + 200);
    const auto got = ad::conv1d_forward(x, w.values(), b.values(), c_out, kernel, dilation);
    const auto want = oracle::naive_conv1d(x, w.values(), b.values(), c_out, kernel, dilation);
    ASSERT_EQ(got.values().size(), want.values().size());
    for (std::size_t i = 0; i < got.values().size(); ++i) {
      ASSERT_EQ(got.values()[i], want.values()[i]) << "seed " << seed << " index " << i;
    }
  }
}

TEST(Conv, DilationBeyondLengthSeesOnlyCenterTap) {
  Tensor2D x(1, 4, std::vector<double>{1, 2, 3, 4});
  std::vector<double> w{10.0, 1.0, 100.0};
  std::vector<double> b{0.5};
  const auto y = ad::conv1d_forward(x, w, b, 1, 3, 9);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_DOUBLE_EQ(y(0, t), 0.5 + x(0, t));
}

TEST(Conv, GradientMatchesFiniteDifferences) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    ad::ParamSet params;
    const std::size_t w = params.add("w", {3, 2, 3});
    const std::size_t b = params.add("b", {3});
    testing::randomize(params, seed);
    const Tensor2D x = random_tensor(2, 11, seed + 7);
    const Tensor2D target = random_tensor(3, 11, seed + 9, 0.0, 1.0);
    auto res = check_gradients(params, [&](ad::Tape& tape) {
      auto in = tape.input(x);
      auto y = ad::conv1d_dilated(tape, in, params[w], params[b], 1 + seed % 4);
      return ad::binary_cross_entropy(tape, ad::sigmoid(tape, y), target);
    });
    EXPECT_LT(res.max_rel_error, 1e-4) << res.worst;
  }
}

TEST(Ops, InputGradientsOfAddAverageScaleRelu) {
  ad::ParamSet params;
  const std::size_t w = params.add("w", {2, 2, 3});
  const std::size_t b = params.add("b", {2});
  testing::randomize(params, 3);
  const Tensor2D x = random_tensor(2, 9, 4);
  auto res = check_gradients(params, [&](ad::Tape& tape) {
    auto in = tape.input(x);
    auto a = ad::relu(tape, ad::conv1d_dilated(tape, in, params[w], params[b], 1));
    auto c = ad::relu(tape, ad::conv1d_dilated(tape, a, params[w], params[b], 2));
    std::vector<ad::Var> parts{a, c, ad::scale(tape, a, -0.3)};
    auto avg = ad::average(tape, parts);
    return ad::sum(tape, ad::add(tape, avg, in));
  });
  EXPECT_LT(res.max_rel_error, 1e-4) << res.worst;
}

TEST(Ops, SliceTimeGradients) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    ad::ParamSet params;
    const std::size_t w = params.add("w", {3, 2, 3});
    const std::size_t b = params.add("b", {3});
    testing::randomize(params, seed);
    const Tensor2D x = random_tensor(2, 12, seed + 3);
    const std::size_t begin = seed % 4, end = 12 - seed % 3;
    const Tensor2D target = random_tensor(3, end - begin, seed + 5, 0.0, 1.0);
    auto res = check_gradients(params, [&](ad::Tape& tape) {
      auto y = ad::sigmoid(tape, ad::conv1d_dilated(tape, tape.input(x), params[w], params[b], 2));
      return ad::binary_cross_entropy(tape, ad::slice_time(tape, y, begin, end), target);
    });
    EXPECT_LT(res.max_rel_error, 1e-4) << res.worst;
  }
  Tensor2D x(2, 5, std::vector<double>{0, 1, 2, 3, 4, 10, 11, 12, 13, 14});
  const auto s = x.slice_time(1, 3);
  EXPECT_EQ(s, Tensor2D(2, 2, std::vector<double>{1, 2, 11, 12}));
  EXPECT_THROW(x.slice_time(3, 3), ShapeError);
  EXPECT_THROW(x.slice_time(2, 6), ShapeError);
}

TEST(Ops, FullyConnectedAndSmoothL1Gradients) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    ad::ParamSet params;
    const std::size_t w1 = params.add("w1", {4, 5});
    const std::size_t b1 = params.add("b1", {4});
    const std::size_t w2 = params.add("w2", {1, 4});
    const std::size_t b2 = params.add("b2", {1});
    testing::randomize(params, seed, 1.0);
    const Tensor2D x = random_tensor(5, 6, seed + 1);
    const Tensor2D target = random_tensor(1, 6, seed + 2, 0.0, 2.0);
    auto res = check_gradients(params, [&](ad::Tape& tape) {
      auto h = ad::relu(tape, ad::fully_connected(tape, tape.input(x), params[w1], params[b1]));
      auto y = ad::fully_connected(tape, h, params[w2], params[b2]);
      return ad::smooth_l1_loss(tape, y, target);
    });
    EXPECT_LT(res.max_rel_error, 1e-4) << res.worst;
  }
}

TEST(Ops, SmoothL1Definition) {
  EXPECT_DOUBLE_EQ(ad::smooth_l1(0.5), 0.125);
  EXPECT_DOUBLE_EQ(ad::smooth_l1(-0.5), 0.125);
  EXPECT_DOUBLE_EQ(ad::smooth_l1(2.0), 1.5);
  EXPECT_DOUBLE_EQ(ad::smooth_l1(-3.0), 2.5);
  EXPECT_DOUBLE_EQ(ad::smooth_l1(1.0), 0.5);
}

TEST(Ops, SigmoidIsStableAtExtremes) {
  EXPECT_DOUBLE_EQ(ad::sigmoid(0.0), 0.5);
  EXPECT_TRUE(std::isfinite(ad::sigmoid(-800.0)));
  EXPECT_DOUBLE_EQ(ad::sigmoid(800.0), 1.0);
  EXPECT_NEAR(ad::sigmoid(2.0), 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
}

TEST(Ops, BceIsNegativeLogLikelihood) {
  ad::Tape tape;
  Tensor2D p(1, 2, std::vector<double>{0.8, 0.25});
  Tensor2D g(1, 2, std::vector<double>{1.0, 0.0});
  auto loss = ad::binary_cross_entropy(tape, tape.input(p), g);
  EXPECT_NEAR(tape.value(loss)(0, 0), -std::log(0.8) - std::log(0.75), 1e-12);
}

TEST(Tape, NonFiniteRaisesNumericError) {
  ad::Tape tape;
  Tensor2D x(1, 2, std::vector<double>{1e308, 1e308});
  auto v = tape.input(x);
  EXPECT_THROW(ad::scale(tape, v, 10.0), NumericError);
}

TEST(Tape, SecondBackwardIsRejected) {
  ad::Tape tape;
  auto v = tape.input(Tensor2D(1, 3, 1.0), true);
  auto loss = ad::sum(tape, v);
  tape.backward(loss);
  EXPECT_THROW(tape.backward(loss), ConfigError);
}

TEST(Tape, BackwardVisitsInReverseOrder) {
  ad::Tape tape;
  auto a = tape.input(Tensor2D(1, 3, 1.0), true);
  auto b = ad::scale(tape, a, 2.0);
  auto c = ad::relu(tape, b);
  auto loss = ad::sum(tape, c);
  tape.backward(loss);
  const auto& order = tape.visit_order();
  ASSERT_FALSE(order.empty());
  for (std::size_t i = 1; i < order.size(); ++i) EXPECT_GT(order[i - 1], order[i]);
  EXPECT_EQ(order.front(), loss.id);
  EXPECT_DOUBLE_EQ(tape.grad(a)(0, 1), 2.0);
}

TEST(Tape, GradientAccumulationIsIndependentOfGrouping) {
  ad::ParamSet params;
  const std::size_t w = params.add("w", {2, 1, 3});
  const std::size_t b = params.add("b", {2});
  testing::randomize(params, 5);
  std::vector<Tensor2D> xs;
  for (unsigned i = 0; i < 6; ++i) xs.push_back(random_tensor(1, 8, 50 + i));
  auto run = [&](std::size_t chunk) {
    params.zero_gradients();
    for (std::size_t start = 0; start < xs.size(); start += chunk) {
      std::vector<ad::Tape> tapes(std::min(chunk, xs.size() - start));
      for (std::size_t j = 0; j < tapes.size(); ++j) {
        auto y = ad::conv1d_dilated(tapes[j], tapes[j].input(xs[start + j]), params[w], params[b], 1);
        tapes[j].backward(ad::sum(tapes[j], ad::relu(tapes[j], y)));
      }
      for (auto& t : tapes) t.accumulate_gradients(params, 1.0 / 6.0);
    }
    return params[w].gradient;
  };
  EXPECT_EQ(run(1), run(4));
}

TEST(Optimizer, SgdStepAndSchedule) {
  ad::ParamSet params;
  const std::size_t w = params.add("w", {2});
  params[w].values = {1.0, -1.0};
  params[w].gradient = {0.5, -2.0};
  ad::sgd_step(params, 0.1);
  EXPECT_DOUBLE_EQ(params[w].values[0], 0.95);
  EXPECT_DOUBLE_EQ(params[w].values[1], -0.8);
  LearningRateSchedule lr;
  EXPECT_DOUBLE_EQ(lr.at(0), 1e-3);
  EXPECT_DOUBLE_EQ(lr.at(9), 1e-3);
  EXPECT_DOUBLE_EQ(lr.at(10), 1e-4);
  EXPECT_DOUBLE_EQ(lr.at(19), 1e-4);
}

TEST(Optimizer, AdamFirstStepHasLearningRateMagnitude) {
  ad::ParamSet params;
  const std::size_t w = params.add("w", {3});
  params[w].values = {0.0, 0.0, 0.0};
  params[w].gradient = {3.0, -1e-3, 0.0};
  ad::Adam adam;
  adam.step(params, 0.01);
  EXPECT_NEAR(params[w].values[0], -0.01, 1e-9);
  EXPECT_NEAR(params[w].values[1], 0.01, 1e-7);
  EXPECT_DOUBLE_EQ(params[w].values[2], 0.0);
}

}  // namespace
}  // namespace tsa
