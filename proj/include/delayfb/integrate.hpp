#pragma once

#include <cstdint>
#include <iosfwd>

#include "delayfb/rollout.hpp"
#include "delayfb/system.hpp"

namespace delayfb {

// Dense-output solution of the closed loop x'(t) = A x(t) + D x(t-h) on the
// uniform grid t_k = k*delta, delta = h/r, covering [-h, t_end].
class Trajectory {
 public:
  int dim() const { return grid_.n; }
  int steps_per_delay() const { return grid_.r; }
  double delta() const { return grid_.delta; }
  double delay() const { return grid_.h; }
  double t_end() const { return grid_.t_end(); }
  const Eigen::MatrixXd& gain() const { return gain_; }

  // grid index range is k = -r .. num_steps()
  std::int64_t num_steps() const { return grid_.steps; }
  Eigen::VectorXd state_at(std::int64_t k) const;
  Eigen::VectorXd deriv_at(std::int64_t k) const;

  // cubic Hermite dense output; exact at grid points
  Eigen::VectorXd eval(double t) const;

 private:
  friend Trajectory simulate(const DelaySystem&, const Gain&,
                             const InitialFunction&, double, int);
  detail::UnrolledGrid grid_;
  Eigen::MatrixXd gain_;
};

// Method-of-steps RK4 with step delta = h/r, integrated to the smallest grid
// time >= T. Throws NonfiniteState if the state overflows.
Trajectory simulate(const DelaySystem& sys, const Gain& gain,
                    const InitialFunction& phi, double T, int r);

// ||x(T)||_2 from dense output; requires T <= t_end (tolerance 1e-12 * h).
double terminal_norm(const Trajectory& traj, double T);

// CSV rows `t,x1,...,xn` for every grid point from -h to t_end,
// 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace delayfb
