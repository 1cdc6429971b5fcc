#include "delayfb/sensitivity.hpp"

#include <cmath>

#include "delayfb/rollout.hpp"

namespace delayfb {

GradientResult loss_and_gradient(const DelaySystem& sys, const Gain& gain,
                                 const InitialFunction& phi, double T, int r) {
  require_valid(sys);
  if (phi.delay() != sys.h) {
    throw std::invalid_argument("history delay does not match system delay");
  }
  const int n = sys.n();
  const int m = sys.m();
  const int p = sys.p();
  const Eigen::MatrixXd D = delayed_matrix(sys, gain);

  detail::DelayedLinearRhs rhs;
  rhs.n = n;
  rhs.q = 1 + m * p;
  rhs.A.resize(static_cast<size_t>(n) * n);
  rhs.D.resize(static_cast<size_t>(n) * n);
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMajor>(rhs.A.data(), n, n) = sys.A;
  Eigen::Map<RowMajor>(rhs.D.data(), n, n) = D;

  // column 1 + i*p + j differentiates against K(i, j); its forcing is
  // B e_i e_j^T C applied to the delayed plant state
  rhs.fcols.resize(static_cast<size_t>(m * p) * n);
  rhs.frows.resize(static_cast<size_t>(m * p) * n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < p; ++j) {
      const int c = i * p + j;
      Eigen::Map<Eigen::VectorXd>(rhs.fcols.data() + static_cast<size_t>(c) * n,
                                  n) = sys.B.col(i);
      Eigen::Map<Eigen::VectorXd>(rhs.frows.data() + static_cast<size_t>(c) * n,
                                  n) = sys.C.row(j).transpose();
    }
  }

  GradientResult result;
  result.grad = Eigen::MatrixXd::Zero(m, p);
  try {
    const detail::UnrolledGrid grid = detail::unroll(rhs, phi, T, r);
    Eigen::MatrixXd terminal(n, rhs.q);
    grid.eval_time(T, terminal.data());
    const Eigen::VectorXd x = terminal.col(0);
    const double norm = x.norm();
    result.loss = norm;
    if (norm >= kNormFloor) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < p; ++j) {
          result.grad(i, j) = x.dot(terminal.col(1 + i * p + j)) / norm;
        }
      }
    }
  } catch (const NonfiniteState&) {
    result.loss = kCappedLoss;
    result.grad.setZero();
    result.aborted = 1;
  }
  return result;
}

GradientResult batch_loss_and_gradient(const DelaySystem& sys, const Gain& gain,
                                       const std::vector<InitialFunction>& phis,
                                       double T, int r) {
  if (phis.empty()) throw std::invalid_argument("empty-batch");
  GradientResult total;
  total.grad = Eigen::MatrixXd::Zero(sys.m(), sys.p());
  for (const InitialFunction& phi : phis) {
    const GradientResult one = loss_and_gradient(sys, gain, phi, T, r);
    total.loss += one.loss;
    total.grad += one.grad;
    total.aborted += one.aborted;
  }
  const double scale = 1.0 / static_cast<double>(phis.size());
  total.loss *= scale;
  total.grad *= scale;
  return total;
}

}  // namespace delayfb
