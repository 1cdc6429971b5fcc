#include "delayfb/adam.hpp"

#include <cmath>

namespace delayfb {

AdamState AdamState::init(int m, int p, double lr) {
  AdamState state;
  state.lr = lr;
  state.first_moment = Eigen::MatrixXd::Zero(m, p);
  state.second_moment = Eigen::MatrixXd::Zero(m, p);
  return state;
}

std::pair<AdamState, Gain> adam_step(const AdamState& state, const Gain& gain,
                                     const Eigen::MatrixXd& grad) {
  if (!grad.allFinite()) {
    throw std::invalid_argument("nonfinite-gradient in adam step");
  }
  if (grad.rows() != gain.K.rows() || grad.cols() != gain.K.cols() ||
      state.first_moment.rows() != grad.rows() ||
      state.first_moment.cols() != grad.cols()) {
    throw std::invalid_argument("dimension-mismatch in adam step");
  }
  AdamState next = state;
  next.step_count = state.step_count + 1;
  next.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * grad;
  next.second_moment = state.beta2 * state.second_moment +
                       (1.0 - state.beta2) * grad.cwiseProduct(grad);
  const double t = static_cast<double>(next.step_count);
  const Eigen::MatrixXd m_hat = next.first_moment / (1.0 - std::pow(state.beta1, t));
  const Eigen::MatrixXd v_hat = next.second_moment / (1.0 - std::pow(state.beta2, t));
  const Eigen::MatrixXd denom =
      (v_hat.cwiseSqrt().array() + state.eps).matrix();
  Gain updated{gain.K - state.lr * m_hat.cwiseQuotient(denom)};
  return {std::move(next), std::move(updated)};
}

}  // namespace delayfb
