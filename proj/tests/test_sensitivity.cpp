#include <doctest.h>

#include <cmath>
#include <random>

#include "delayfb/bench.hpp"
#include "delayfb/integrate.hpp"
#include "delayfb/sensitivity.hpp"
#include "delayfb/train.hpp"

using namespace delayfb;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

DelaySystem scalar_system(double a, double h) {
  DelaySystem sys;
  sys.A = MatrixXd::Constant(1, 1, a);
  sys.B = MatrixXd::Constant(1, 1, 1.0);
  sys.C = MatrixXd::Constant(1, 1, 1.0);
  sys.h = h;
  return sys;
}

Gain scalar_gain(double k) { return Gain{MatrixXd::Constant(1, 1, k)}; }

InitialFunction const_history(double c) {
  return InitialFunction::constant(VectorXd::Constant(1, c), 1.0);
}

}  // namespace

TEST_CASE("scalar loop x' = K x(t-1) has closed-form loss and gradient") {
  // on [0, 1]: x(t) = 1 + K t, so x(1) = 1 + K and dx(1)/dK = 1
  const DelaySystem sys = scalar_system(0.0, 1.0);

  const GradientResult half =
      loss_and_gradient(sys, scalar_gain(-0.5), const_history(1.0), 1.0, 64);
  CHECK(std::abs(half.loss - 0.5) < 1e-8);
  CHECK(std::abs(half.grad(0, 0) - 1.0) < 1e-8);
  CHECK(half.aborted == 0);

  const GradientResult two =
      loss_and_gradient(sys, scalar_gain(-2.0), const_history(1.0), 1.0, 64);
  CHECK(std::abs(two.loss - 1.0) < 1e-8);
  CHECK(std::abs(two.grad(0, 0) - (-1.0)) < 1e-8);

  const GradientResult quiet =
      loss_and_gradient(sys, scalar_gain(-0.5), const_history(0.0), 1.0, 64);
  CHECK(quiet.loss == 0.0);
  CHECK(quiet.grad(0, 0) == 0.0);
}

TEST_CASE("sensitivity grows linearly on the scalar loop") {
  // S' = K S(t-1) + x(t-1) = 0 + 1 on [0, 1], so S(1) = 1; with x(1) > 0 the
  // reported gradient is exactly S(1)
  const DelaySystem sys = scalar_system(0.0, 1.0);
  const GradientResult result =
      loss_and_gradient(sys, scalar_gain(-0.5), const_history(1.0), 1.0, 32);
  CHECK(std::abs(result.grad(0, 0) - 1.0) < 1e-8);
}

TEST_CASE("batch reduction is an exact index-ordered mean") {
  const DelaySystem sys = scalar_system(0.0, 1.0);
  const Gain gain = scalar_gain(-0.5);
  const InitialFunction phi = const_history(1.0);

  const GradientResult single = loss_and_gradient(sys, gain, phi, 1.0, 32);
  const GradientResult batch1 = batch_loss_and_gradient(sys, gain, {phi}, 1.0, 32);
  CHECK(batch1.loss == single.loss);
  CHECK(batch1.grad == single.grad);

  const GradientResult batch2 =
      batch_loss_and_gradient(sys, gain, {phi, phi}, 1.0, 32);
  CHECK(batch2.loss == single.loss);
  CHECK(batch2.grad == single.grad);

  // x(1) = c (1 + K) for phi = c: losses 0.5 and 1.0, gradients 1 and 2
  const GradientResult mixed = batch_loss_and_gradient(
      sys, gain, {const_history(1.0), const_history(2.0)}, 1.0, 32);
  CHECK(std::abs(mixed.loss - 0.75) < 1e-8);
  CHECK(std::abs(mixed.grad(0, 0) - 1.5) < 1e-8);

  CHECK_THROWS_AS(batch_loss_and_gradient(sys, gain, {}, 1.0, 32),
                  std::invalid_argument);
}

TEST_CASE("gradients match central finite differences on random systems") {
  std::mt19937_64 engine(2024);
  std::uniform_real_distribution<double> delay(0.1, 1.0);
  std::uniform_real_distribution<double> horizon(0.5, 3.0);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  const double step = 1e-5;

  int checked = 0;
  while (checked < 8) {
    const int n = 1 + static_cast<int>(engine() % 4);
    const int m = 1 + static_cast<int>(engine() % 2);
    const int p = 1 + static_cast<int>(engine() % 2);
    const double h = delay(engine);
    const double T = horizon(engine);
    const DelaySystem sys = random_system(n, m, p, h, engine());
    Gain gain{MatrixXd::NullaryExpr(m, p, [&] { return entry(engine); })};
    const InitialFunction phi =
        sample_initial_functions(n, h, 1, engine(), SamplerKind::constant_sphere)
            .front();

    const GradientResult result = loss_and_gradient(sys, gain, phi, T, 32);
    if (result.aborted > 0 || result.loss < 1e-3) continue;
    ++checked;

    MatrixXd fd(m, p);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < p; ++j) {
        Gain plus = gain, minus = gain;
        plus.K(i, j) += step;
        minus.K(i, j) -= step;
        fd(i, j) = (loss_and_gradient(sys, plus, phi, T, 32).loss -
                    loss_and_gradient(sys, minus, phi, T, 32).loss) /
                   (2.0 * step);
      }
    }
    const double rel = (result.grad - fd).cwiseAbs().maxCoeff() /
                       std::max(fd.cwiseAbs().maxCoeff(), 1e-12);
    CHECK(rel < 1e-5);
  }
}

TEST_CASE("the terminal cost scales linearly with the history") {
  DelaySystem wide;
  std::mt19937_64 engine(77);
  std::normal_distribution<double> normal;
  wide.A = MatrixXd::NullaryExpr(3, 3, [&] { return normal(engine); });
  wide.B = MatrixXd::NullaryExpr(3, 1, [&] { return normal(engine); });
  wide.C = MatrixXd::NullaryExpr(2, 3, [&] { return normal(engine); });
  wide.h = 0.5;
  const Gain gain{MatrixXd::NullaryExpr(1, 2, [&] { return normal(engine); })};
  const VectorXd base = VectorXd::NullaryExpr(3, [&] { return normal(engine); });

  const double alpha = 3.5;
  const auto phi = InitialFunction::constant(base, wide.h);
  const auto scaled = InitialFunction::constant(alpha * base, wide.h);
  const GradientResult one = loss_and_gradient(wide, gain, phi, 2.0, 16);
  const GradientResult big = loss_and_gradient(wide, gain, scaled, 2.0, 16);
  CHECK(std::abs(big.loss - alpha * one.loss) <= 1e-13 * (1.0 + big.loss));
  CHECK((big.grad - alpha * one.grad).cwiseAbs().maxCoeff() <=
        1e-12 * (1.0 + big.grad.cwiseAbs().maxCoeff()));
}

TEST_CASE("overflowing rollouts are capped with zero gradient") {
  const DelaySystem sys = scalar_system(6.0, 1.0);
  const GradientResult result =
      loss_and_gradient(sys, scalar_gain(0.5), const_history(1.0), 60.0, 8);
  CHECK(result.loss == kCappedLoss);
  CHECK(result.grad(0, 0) == 0.0);
  CHECK(result.aborted == 1);

  const GradientResult batch = batch_loss_and_gradient(
      sys, scalar_gain(0.5), {const_history(1.0), const_history(0.0)}, 60.0, 8);
  CHECK(batch.aborted == 1);
  CHECK(batch.loss == doctest::Approx(kCappedLoss / 2.0));
  CHECK(std::isfinite(batch.loss));
}

TEST_CASE("the sensitivity loss agrees with the plain simulation loss") {
  std::mt19937_64 engine(99);
  for (int trial = 0; trial < 5; ++trial) {
    const DelaySystem sys = random_system(3, 1, 2, 0.4, engine());
    std::normal_distribution<double> normal;
    const Gain gain{MatrixXd::NullaryExpr(1, 2, [&] { return 0.3 * normal(engine); })};
    const auto phi =
        sample_initial_functions(3, 0.4, 1, engine(), SamplerKind::sampled_path)
            .front();
    const GradientResult result = loss_and_gradient(sys, gain, phi, 2.0, 16);
    const Trajectory traj = simulate(sys, gain, phi, 2.0, 16);
    CHECK(std::abs(result.loss - terminal_norm(traj, 2.0)) <=
          1e-12 * (1.0 + result.loss));
  }
}
