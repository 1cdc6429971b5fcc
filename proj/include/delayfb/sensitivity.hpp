#pragma once

#include <vector>

#include "delayfb/system.hpp"

namespace delayfb {

// Loss assigned to a rollout that overflowed; its gradient is zero so the
// optimizer can recover from violently unstable gains.
inline constexpr double kCappedLoss = 1e6;

// ||x(T)|| is treated as exactly zero below this, with zero (sub)gradient.
inline constexpr double kNormFloor = 1e-12;

struct GradientResult {
  double loss = 0.0;
  Eigen::MatrixXd grad;  // m x p, d loss / d K
  int aborted = 0;       // rollouts that hit the overflow cap
};

// Terminal cost ||x(T)|| and its exact gradient with respect to K for one
// initial history, via forward sensitivities S_ij = dx/dK_ij integrated
// jointly with the state on the same grid (so the gradient differentiates
// the discretized loss exactly).
GradientResult loss_and_gradient(const DelaySystem& sys, const Gain& gain,
                                 const InitialFunction& phi, double T, int r);

// Arithmetic mean of per-sample losses and gradients, accumulated in index
// order so results are deterministic.
GradientResult batch_loss_and_gradient(const DelaySystem& sys, const Gain& gain,
                                       const std::vector<InitialFunction>& phis,
                                       double T, int r);

}  // namespace delayfb
