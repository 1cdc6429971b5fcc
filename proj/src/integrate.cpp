#include "delayfb/integrate.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace delayfb {

Eigen::VectorXd Trajectory::state_at(std::int64_t k) const {
  const std::int64_t s = k + grid_.r;
  if (s < 0 || s >= grid_.num_nodes()) {
    throw OutOfDomain("grid index out of range");
  }
  return Eigen::Map<const Eigen::VectorXd>(grid_.node(s), grid_.n);
}

Eigen::VectorXd Trajectory::deriv_at(std::int64_t k) const {
  const std::int64_t s = k + grid_.r;
  if (s < 0 || s >= grid_.num_nodes()) {
    throw OutOfDomain("grid index out of range");
  }
  return Eigen::Map<const Eigen::VectorXd>(grid_.node_deriv(s), grid_.n);
}

Eigen::VectorXd Trajectory::eval(double t) const {
  Eigen::VectorXd out(grid_.n);
  grid_.eval_time(t, out.data());
  return out;
}

Trajectory simulate(const DelaySystem& sys, const Gain& gain,
                    const InitialFunction& phi, double T, int r) {
  require_valid(sys);
  if (phi.delay() != sys.h) {
    throw std::invalid_argument("history delay does not match system delay");
  }
  const Eigen::MatrixXd D = delayed_matrix(sys, gain);
  const int n = sys.n();

  detail::DelayedLinearRhs rhs;
  rhs.n = n;
  rhs.q = 1;
  rhs.A.resize(static_cast<size_t>(n) * n);
  rhs.D.resize(static_cast<size_t>(n) * n);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>(rhs.A.data(), n, n) = sys.A;
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>(rhs.D.data(), n, n) = D;

  Trajectory traj;
  traj.grid_ = detail::unroll(rhs, phi, T, r);
  traj.gain_ = gain.K;
  return traj;
}

double terminal_norm(const Trajectory& traj, double T) {
  return traj.eval(T).norm();
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const int n = traj.dim();
  out << 't';
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  out << '\n';
  char buf[32];
  for (std::int64_t k = -traj.steps_per_delay(); k <= traj.num_steps(); ++k) {
    const double t = static_cast<double>(k) * traj.delta();
    std::snprintf(buf, sizeof(buf), "%.17g", t);
    out << buf;
    const Eigen::VectorXd x = traj.state_at(k);
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", x[i]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace delayfb
