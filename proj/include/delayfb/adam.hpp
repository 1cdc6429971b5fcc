#pragma once

#include <utility>

#include "delayfb/system.hpp"

namespace delayfb {

struct AdamState {
  double lr = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Eigen::MatrixXd first_moment;   // m x p
  Eigen::MatrixXd second_moment;  // m x p, entrywise >= 0
  long step_count = 0;

  static AdamState init(int m, int p, double lr = 0.1);
};

// One bias-corrected Adam update. Throws std::invalid_argument on a
// non-finite gradient.
std::pair<AdamState, Gain> adam_step(const AdamState& state, const Gain& gain,
                                     const Eigen::MatrixXd& grad);

}  // namespace delayfb
