#include <doctest.h>

#include <random>

#include "delayfb/system.hpp"

using namespace delayfb;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

DelaySystem scalar_system(double a, double h = 1.0) {
  DelaySystem sys;
  sys.A = MatrixXd::Constant(1, 1, a);
  sys.B = MatrixXd::Constant(1, 1, 1.0);
  sys.C = MatrixXd::Constant(1, 1, 1.0);
  sys.h = h;
  return sys;
}

}  // namespace

TEST_CASE("validate accepts a minimal system and names violations") {
  DelaySystem sys = scalar_system(0.1);
  CHECK(validate(sys) == ValidateCode::ok);

  DelaySystem zero_delay = sys;
  zero_delay.h = 0.0;
  CHECK(validate(zero_delay) == ValidateCode::nonpositive_delay);

  DelaySystem mismatched;
  mismatched.A = MatrixXd::Zero(2, 2);
  mismatched.B = MatrixXd::Zero(3, 1);
  mismatched.C = MatrixXd::Zero(1, 2);
  mismatched.h = 1.0;
  CHECK(validate(mismatched) == ValidateCode::dimension_mismatch);

  DelaySystem infinite = sys;
  infinite.A(0, 0) = std::numeric_limits<double>::infinity();
  CHECK(validate(infinite) == ValidateCode::nonfinite_entry);

  CHECK_THROWS_AS(require_valid(zero_delay), std::invalid_argument);
}

TEST_CASE("validate flags exactly the randomized violations") {
  std::mt19937_64 engine(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(engine() % 4);
    const int m = 1 + static_cast<int>(engine() % 3);
    const int p = 1 + static_cast<int>(engine() % 3);
    DelaySystem sys;
    sys.A = MatrixXd::NullaryExpr(n, n, [&] { return normal(engine); });
    sys.B = MatrixXd::NullaryExpr(n, m, [&] { return normal(engine); });
    sys.C = MatrixXd::NullaryExpr(p, n, [&] { return normal(engine); });
    sys.h = 0.1 + 0.9 * std::uniform_real_distribution<double>()(engine);
    REQUIRE(validate(sys) == ValidateCode::ok);

    DelaySystem broken = sys;
    switch (trial % 3) {
      case 0:
        broken.B = MatrixXd::Zero(n + 1, m);
        CHECK(validate(broken) == ValidateCode::dimension_mismatch);
        break;
      case 1:
        broken.h = -sys.h;
        CHECK(validate(broken) == ValidateCode::nonpositive_delay);
        break;
      case 2:
        broken.C(0, 0) = std::nan("");
        CHECK(validate(broken) == ValidateCode::nonfinite_entry);
        break;
    }
  }
}

TEST_CASE("delayed_matrix multiplies B K C") {
  DelaySystem sys = scalar_system(0.0);
  CHECK(delayed_matrix(sys, Gain{MatrixXd::Constant(1, 1, -1.0)})(0, 0) ==
        doctest::Approx(-1.0));

  DelaySystem rect;
  rect.A = MatrixXd::Zero(2, 2);
  rect.B = (MatrixXd(2, 1) << 1.0, 0.0).finished();
  rect.C = (MatrixXd(1, 2) << 0.0, 1.0).finished();
  rect.h = 1.0;
  const MatrixXd d = delayed_matrix(rect, Gain{MatrixXd::Constant(1, 1, 2.0)});
  // direct multiplication oracle: B K C = [[0, 2], [0, 0]]
  CHECK(d(0, 0) == 0.0);
  CHECK(d(0, 1) == 2.0);
  CHECK(d(1, 0) == 0.0);
  CHECK(d(1, 1) == 0.0);

  CHECK(delayed_matrix(rect, Gain{MatrixXd::Zero(1, 1)}).isZero(0.0));
  CHECK_THROWS_AS(delayed_matrix(rect, Gain{MatrixXd::Zero(2, 2)}),
                  std::invalid_argument);
}

TEST_CASE("delayed_matrix is bilinear in the gain") {
  std::mt19937_64 engine(11);
  std::normal_distribution<double> normal;
  DelaySystem sys;
  sys.A = MatrixXd::Zero(3, 3);
  sys.B = MatrixXd::NullaryExpr(3, 2, [&] { return normal(engine); });
  sys.C = MatrixXd::NullaryExpr(2, 3, [&] { return normal(engine); });
  sys.h = 0.5;
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd k1 = MatrixXd::NullaryExpr(2, 2, [&] { return normal(engine); });
    const MatrixXd k2 = MatrixXd::NullaryExpr(2, 2, [&] { return normal(engine); });
    const double alpha = normal(engine);
    const double beta = normal(engine);
    const MatrixXd combined = delayed_matrix(sys, Gain{alpha * k1 + beta * k2});
    const MatrixXd parts = alpha * delayed_matrix(sys, Gain{k1}) +
                           beta * delayed_matrix(sys, Gain{k2});
    CHECK((combined - parts).cwiseAbs().maxCoeff() <=
          1e-13 * (1.0 + parts.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("history evaluation is exact for constant and linear kinds") {
  const double h = 0.7;
  const VectorXd v = (VectorXd(2) << 1.5, -2.0).finished();
  const InitialFunction constant = InitialFunction::constant(v, h);
  CHECK(constant.eval(0.0) == v);
  CHECK(constant.eval(-h) == v);
  CHECK(constant.eval(-h / 3) == v);
  CHECK(constant.derivative(-0.1).isZero(0.0));

  const VectorXd v0 = (VectorXd(2) << 0.5, 1.0).finished();
  const VectorXd v1 = (VectorXd(2) << -1.0, 2.0).finished();
  const InitialFunction linear = InitialFunction::linear(v0, v1, h);
  CHECK(linear.eval(-h) == v0 - h * v1);
  CHECK(linear.eval(0.0) == v0);
  CHECK(linear.derivative(-h / 2) == v1);
}

TEST_CASE("sampled-grid history reproduces quadratics through cubic stencils") {
  const double h = 0.8;
  Eigen::MatrixXd nodes(1, 9);
  for (int i = 0; i < 9; ++i) {
    const double theta = -h + h * i / 8.0;
    nodes(0, i) = theta * theta;
  }
  const InitialFunction phi = InitialFunction::sampled(nodes, h);
  const double theta = -h / 3.0;
  CHECK(std::abs(phi.eval(theta)(0) - h * h / 9.0) < 1e-6 * h * h);
  for (int i = 0; i < 9; ++i) {
    const double at = -h + h * i / 8.0;
    CHECK(std::abs(phi.eval(at)(0) - nodes(0, i)) < 1e-14);
  }
  // the cubic stencils also reproduce the derivative 2 theta
  CHECK(phi.derivative(theta)(0) == doctest::Approx(2.0 * theta).epsilon(1e-9));
}

TEST_CASE("sampled-grid history is continuous across stencil switches") {
  const double h = 1.0;
  std::mt19937_64 engine(3);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd nodes =
      Eigen::MatrixXd::NullaryExpr(2, 11, [&] { return normal(engine); });
  const InitialFunction phi = InitialFunction::sampled(nodes, h);
  for (int i = 1; i < 10; ++i) {
    const double at = -h + h * i / 10.0;
    const double eps = 1e-9;
    CHECK((phi.eval(at - eps) - phi.eval(at + eps)).norm() < 1e-7);
  }
}

TEST_CASE("history evaluation rejects out-of-domain arguments") {
  const InitialFunction phi = InitialFunction::constant(VectorXd::Ones(1), 1.0);
  CHECK_THROWS_AS(phi.eval(-1.0 - 1e-6), OutOfDomain);
  CHECK_THROWS_AS(phi.eval(1e-6), OutOfDomain);
  // inside the 1e-12 * h tolerance the argument clamps
  CHECK(phi.eval(-1.0 - 5e-13)(0) == 1.0);
  CHECK(phi.eval(5e-13)(0) == 1.0);
}
