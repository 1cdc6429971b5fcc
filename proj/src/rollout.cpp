#include "delayfb/rollout.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace delayfb::detail {

void DelayedLinearRhs::eval(const double* state, const double* delayed,
                            double* out) const {
  const double* a = A.data();
  const double* d = D.data();
  for (int c = 0; c < q; ++c) {
    const double* x = state + c * n;
    const double* xd = delayed + c * n;
    double* o = out + c * n;
    for (int i = 0; i < n; ++i) {
      const double* arow = a + i * n;
      const double* drow = d + i * n;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += arow[j] * x[j] + drow[j] * xd[j];
      o[i] = acc;
    }
  }
  if (q > 1) {
    const double* xd0 = delayed;  // delayed plant state feeds every sensitivity
    for (int c = 1; c < q; ++c) {
      const double* frow = frows.data() + (c - 1) * n;
      const double* fcol = fcols.data() + (c - 1) * n;
      double w = 0.0;
      for (int j = 0; j < n; ++j) w += frow[j] * xd0[j];
      double* o = out + c * n;
      for (int i = 0; i < n; ++i) o[i] += fcol[i] * w;
    }
  }
}

void UnrolledGrid::eval_cell(std::int64_t s, double u, double* out) const {
  const int len = n * q;
  const double* y0 = states.data() + s * len;
  const double* y1 = y0 + len;
  const double* d0 = derivs.data() + s * len;
  // the boundary history cell ends with phi's left-limit derivative, not the
  // closed-loop derivative stored at node r
  const double* d1 = (s + 1 == r) ? hist_deriv_end.data() : d0 + len;
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
  const double h10 = u3 - 2.0 * u2 + u;
  const double h01 = -2.0 * u3 + 3.0 * u2;
  const double h11 = u3 - u2;
  for (int i = 0; i < len; ++i) {
    out[i] = h00 * y0[i] + h01 * y1[i] + delta * (h10 * d0[i] + h11 * d1[i]);
  }
}

void UnrolledGrid::eval_time(double t, double* out) const {
  const double tol = 1e-12 * h;
  if (t < -h - tol || t > t_end() + tol) {
    std::ostringstream oss;
    oss << "out-of-domain: t = " << t << " outside [" << -h << ", " << t_end()
        << "]";
    throw OutOfDomain(oss.str());
  }
  const double pos = t / delta;  // grid units
  double cell = std::floor(pos);
  double u = pos - cell;
  std::int64_t s = static_cast<std::int64_t>(cell) + r;
  // snap to nodes so grid points evaluate exactly; 1e-9 grid units absorbs
  // the rounding of t = k*delta followed by the division above even at large k
  if (u < 1e-9) u = 0.0;
  if (u > 1.0 - 1e-9) {
    u = 0.0;
    ++s;
  }
  if (s < 0) {
    s = 0;
    u = 0.0;
  }
  if (s >= num_nodes() - 1) {
    if (s > num_nodes() - 1) s = num_nodes() - 1;
    if (u == 0.0) {
      std::memcpy(out, node(s), sizeof(double) * n * q);
      return;
    }
    s = num_nodes() - 2;
    u = 1.0;
  }
  if (u == 0.0) {
    std::memcpy(out, node(s), sizeof(double) * n * q);
    return;
  }
  eval_cell(s, u, out);
}

namespace {

void check_finite(const double* block, int len, double time) {
  for (int i = 0; i < len; ++i) {
    const double v = block[i];
    if (!std::isfinite(v) || std::fabs(v) > kOverflowLimit) {
      std::ostringstream oss;
      oss << "nonfinite-state at t = " << time;
      throw NonfiniteState(oss.str(), time);
    }
  }
}

}  // namespace

UnrolledGrid unroll(const DelayedLinearRhs& rhs, const InitialFunction& phi,
                    double T, int r) {
  if (r < 1) throw std::invalid_argument("steps per delay must be >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (phi.dim() != rhs.n) {
    throw std::invalid_argument("dimension-mismatch: history dim " +
                                std::to_string(phi.dim()) + " vs system dim " +
                                std::to_string(rhs.n));
  }

  UnrolledGrid g;
  g.n = rhs.n;
  g.q = rhs.q;
  g.r = r;
  g.h = phi.delay();
  g.delta = g.h / static_cast<double>(r);
  std::int64_t steps = static_cast<std::int64_t>(std::ceil(T / g.delta));
  if (static_cast<double>(steps) * g.delta < T) ++steps;
  if (steps < 1) steps = 1;
  g.steps = steps;

  const int len = rhs.n * rhs.q;
  g.states.assign(static_cast<size_t>(g.num_nodes()) * len, 0.0);
  g.derivs.assign(static_cast<size_t>(g.num_nodes()) * len, 0.0);
  g.hist_deriv_end.assign(len, 0.0);

  // history nodes k = -r .. 0; sensitivity columns stay zero there
  for (int s = 0; s <= r; ++s) {
    const double theta = static_cast<double>(s - r) * g.delta;
    Eigen::VectorXd value = phi.eval(theta);
    Eigen::VectorXd slope = phi.derivative(theta);
    std::memcpy(g.states.data() + static_cast<size_t>(s) * len, value.data(),
                sizeof(double) * rhs.n);
    std::memcpy(g.derivs.data() + static_cast<size_t>(s) * len, slope.data(),
                sizeof(double) * rhs.n);
    if (s == r) {
      std::memcpy(g.hist_deriv_end.data(), slope.data(), sizeof(double) * rhs.n);
    }
  }

  std::vector<double> k1(len), k2(len), k3(len), k4(len), stage(len), mid(len);
  const double dt = g.delta;

  // the stored derivative at node r becomes the closed-loop one
  rhs.eval(g.states.data() + static_cast<size_t>(r) * len, g.states.data(),
           g.derivs.data() + static_cast<size_t>(r) * len);

  for (std::int64_t k = 0; k < steps; ++k) {
    const std::int64_t s = k + r;
    const double* x = g.states.data() + static_cast<size_t>(s) * len;
    const double* d = g.derivs.data() + static_cast<size_t>(s) * len;
    std::memcpy(k1.data(), d, sizeof(double) * len);

    // delayed arguments: t_k - h is node k, the half step is cell [k, k+1]
    // at u = 1/2, and t_k + delta - h is node k + 1 (all already computed)
    g.eval_cell(k, 0.5, mid.data());

    for (int i = 0; i < len; ++i) stage[i] = x[i] + 0.5 * dt * k1[i];
    rhs.eval(stage.data(), mid.data(), k2.data());

    for (int i = 0; i < len; ++i) stage[i] = x[i] + 0.5 * dt * k2[i];
    rhs.eval(stage.data(), mid.data(), k3.data());

    const double* endpoint = g.states.data() + static_cast<size_t>(k + 1) * len;
    for (int i = 0; i < len; ++i) stage[i] = x[i] + dt * k3[i];
    rhs.eval(stage.data(), endpoint, k4.data());

    double* xnext = g.states.data() + static_cast<size_t>(s + 1) * len;
    for (int i = 0; i < len; ++i) {
      xnext[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    }
    const double t_next = static_cast<double>(k + 1) * dt;
    check_finite(xnext, len, t_next);

    // derivative at t_{k+1}: the delayed argument is node (k+1) - r + r = k+1
    const double* delayed_next = g.states.data() + static_cast<size_t>(k + 1) * len;
    rhs.eval(xnext, delayed_next, g.derivs.data() + static_cast<size_t>(s + 1) * len);
  }

  return g;
}

}  // namespace delayfb::detail
