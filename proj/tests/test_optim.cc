#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "reliefir/errors.h"
#include "reliefir/optim.h"

namespace reliefir {
namespace {

ParamTensor scalar(double value) {
  ParamTensor t({1});
  t.values()[0] = value;
  return t;
}

TEST(ParamTensor, ShapeAndRows) {
  ParamTensor m({3, 4});
  EXPECT_EQ(m.rows(), 3u);
  EXPECT_EQ(m.cols(), 4u);
  EXPECT_EQ(m.size(), 12u);
  ParamTensor v({5});
  EXPECT_EQ(v.rows(), 1u);
  EXPECT_EQ(v.cols(), 5u);
}

TEST(ParamTensor, GradRowTracksTouchedRowsOnce) {
  ParamTensor m({4, 2});
  m.grad_row(2)[0] = 1.0;
  m.grad_row(2)[1] = 1.0;
  m.grad_row(0)[0] = 1.0;
  EXPECT_EQ(m.touched_rows(), (std::vector<std::size_t>{2, 0}));
  m.zero_grad();
  EXPECT_TRUE(m.touched_rows().empty());
  for (double g : m.grad_values()) EXPECT_EQ(g, 0.0);
}

TEST(ParamTensor, RoundToStorageMatchesFloat) {
  ParamTensor t({3});
  t.values()[0] = 0.1;
  t.values()[1] = 1.0 / 3.0;
  t.values()[2] = -2.5;
  t.round_to_storage();
  EXPECT_EQ(t.values()[0], static_cast<double>(0.1f));
  EXPECT_EQ(t.values()[1], static_cast<double>(1.0f / 3.0f));
  EXPECT_EQ(t.values()[2], -2.5);
}

TEST(Sgd, ArithmeticExample) {
  auto t = scalar(1.0);
  t.grad()[0] = 0.5;
  sgd_step(t, 0.5);
  EXPECT_DOUBLE_EQ(t.values()[0], 0.75);
  EXPECT_EQ(t.grad_values()[0], 0.0);
}

TEST(Sgd, ZeroGradientLeavesValues) {
  ParamTensor t({2, 2});
  t.values()[3] = 4.0;
  t.grad();
  sgd_step(t, 0.5);
  EXPECT_EQ(t.values()[3], 4.0);
}

TEST(Sgd, OnlyTouchedRowsMove) {
  ParamTensor t({3, 1});
  t.grad_row(1)[0] = 1.0;
  sgd_step(t, 1.0);
  EXPECT_EQ(t.values()[0], 0.0);
  EXPECT_EQ(t.values()[1], -1.0);
  EXPECT_EQ(t.values()[2], 0.0);
}

TEST(Sgd, NonFiniteGradientIsRejectedBeforeAnyUpdate) {
  ParamTensor t({2, 1});
  t.grad_row(0)[0] = 1.0;
  t.grad_row(1)[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(sgd_step(t, 0.1), NumericError);
  EXPECT_EQ(t.values()[0], 0.0);
  auto u = scalar(0.0);
  u.grad()[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(sgd_step(u, 0.1), NumericError);
}

TEST(Adam, FirstStepMovesByAboutTheLearningRate) {
  for (double g : {1e-3, -0.7, 42.0}) {
    for (double beta1 : {0.001, 0.9}) {
      auto t = scalar(0.0);
      t.grad()[0] = g;
      AdamConfig cfg{0.5, beta1, 0.999, 1e-8};
      adam_step(t, cfg, 1);
      double delta = t.values()[0];
      EXPECT_LT(delta * g, 0.0);
      EXPECT_GE(std::abs(delta), 0.9 * cfg.lr);
      EXPECT_LE(std::abs(delta), cfg.lr);
    }
  }
}

TEST(Adam, ZeroGradientEveryStepLeavesValues) {
  auto t = scalar(1.5);
  AdamConfig cfg;
  for (std::uint64_t step = 1; step <= 5; ++step) {
    t.grad();
    adam_step(t, cfg, step);
  }
  EXPECT_EQ(t.values()[0], 1.5);
}

TEST(Adam, DegeneratesToSignSteps) {
  AdamConfig cfg{0.25, 0.0, 0.0, 0.0};
  auto t = scalar(0.0);
  double expected = 0.0;
  for (double g : {3.0, -0.001, 1e6}) {
    t.grad()[0] = g;
    adam_step(t, cfg, 1);
    expected -= g > 0 ? 0.25 : -0.25;
    EXPECT_NEAR(t.values()[0], expected, 1e-15);
  }
}

TEST(Adam, MatchesClosedFormOverSeveralSteps) {
  AdamConfig cfg{0.1, 0.001, 0.999, 1e-8};
  auto t = scalar(2.0);
  double x = 2.0, m = 0.0, v = 0.0;
  for (std::uint64_t step = 1; step <= 6; ++step) {
    double g = x;  // gradient of x^2 / 2
    t.grad()[0] = t.values()[0];
    adam_step(t, cfg, step);
    m = cfg.beta1 * m + (1 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1 - cfg.beta2) * g * g;
    double mh = m / (1 - std::pow(cfg.beta1, step));
    double vh = v / (1 - std::pow(cfg.beta2, step));
    x -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
    EXPECT_NEAR(t.values()[0], x, 1e-12) << "step " << step;
  }
}

TEST(Adam, IdenticalProblemsFollowIdenticalTrajectories) {
  auto run = [] {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n;
    ParamTensor t({4, 3});
    for (double& x : t.values()) x = n(rng);
    AdamConfig cfg;
    for (std::uint64_t step = 1; step <= 20; ++step) {
      std::size_t r = step % 4;
      auto g = t.grad_row(r);
      for (std::size_t k = 0; k < 3; ++k) g[k] = t.row(r)[k] * 2.0 + n(rng);
      adam_step(t, cfg, step);
    }
    auto v = t.values();
    return std::vector<double>(v.begin(), v.end());
  };
  EXPECT_EQ(run(), run());
}

TEST(Adam, RejectsStepZero) {
  auto t = scalar(0.0);
  t.grad()[0] = 1.0;
  EXPECT_THROW(adam_step(t, AdamConfig{}, 0), std::exception);
}

TEST(Clip, ClampsTouchedEntries) {
  ParamTensor t({2, 2});
  auto g = t.grad_row(1);
  g[0] = 9.0;
  g[1] = -0.5;
  clip_grad(t, 5.0);
  EXPECT_EQ(t.grad_values()[2], 5.0);
  EXPECT_EQ(t.grad_values()[3], -0.5);
}

TEST(GradCheck, QuadraticIsExact) {
  auto x = scalar(3.0);
  auto loss = [&] { return 0.5 * x.values()[0] * x.values()[0]; };
  auto loss_and_grad = [&] {
    x.grad()[0] += x.values()[0];
    return loss();
  };
  auto r = grad_check({{"x", &x}}, loss_and_grad, loss, {});
  EXPECT_EQ(r.entries_checked, 1u);
  EXPECT_LT(r.max_rel_error, 1e-9);
  EXPECT_EQ(x.values()[0], 3.0);
}

TEST(GradCheck, DetectsAWrongGradient) {
  ParamTensor w({5});
  for (std::size_t i = 0; i < 5; ++i) w.values()[i] = 0.3 * static_cast<double>(i) - 0.5;
  auto loss = [&] {
    double s = 0.0;
    for (double v : w.values()) s += std::sin(v);
    return s;
  };
  auto wrong = [&] {
    auto g = w.grad();
    for (std::size_t i = 0; i < 5; ++i) g[i] += std::cos(w.values()[i]) * (i == 2 ? 1.5 : 1.0);
    return loss();
  };
  auto r = grad_check({{"w", &w}}, wrong, loss, {});
  EXPECT_GT(r.max_rel_error, 0.1);
  EXPECT_EQ(r.worst_entry, "w[2]");
}

TEST(GradCheck, SamplesEveryTensor) {
  ParamTensor big({100, 10}), small({3});
  auto loss = [&] {
    double s = 0.0;
    for (double v : big.values()) s += v * v;
    for (double v : small.values()) s += 3 * v;
    return s;
  };
  auto lg = [&] {
    auto gb = big.grad();
    for (std::size_t i = 0; i < big.size(); ++i) gb[i] += 2 * big.values()[i];
    for (double& g : small.grad()) g += 3;
    return loss();
  };
  GradCheckOptions opt;
  opt.max_entries = 50;
  opt.min_per_tensor = 16;
  auto r = grad_check({{"big", &big}, {"small", &small}}, lg, loss, opt);
  EXPECT_EQ(r.entries_checked, 50u);
  EXPECT_LT(r.max_rel_error, 1e-6);
}

}  // namespace
}  // namespace reliefir
