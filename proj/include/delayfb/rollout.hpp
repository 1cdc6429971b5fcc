#pragma once

#include <cstdint>
#include <vector>

#include "delayfb/system.hpp"

namespace delayfb::detail {

// |entry| above this aborts the integration with NonfiniteState.
inline constexpr double kOverflowLimit = 1e100;

// Right-hand side of the grid-unrolled linear delay system, evaluated
// column-block-wise on an n x q state:
//
//   col 0:      A x + D xd                                (the plant state)
//   col c >= 1: A s_c + D sd_c + fcol_c * (frow_c . xd)   (one sensitivity)
//
// fcol_c / frow_c hold B e_i and e_j^T C for the gain entry (i, j) the
// column differentiates against. All buffers are row-major, columns of the
// state block are contiguous (block layout: q consecutive n-vectors).
struct DelayedLinearRhs {
  int n = 0;
  int q = 1;
  std::vector<double> A;      // n*n row-major
  std::vector<double> D;      // n*n row-major
  std::vector<double> fcols;  // (q-1)*n
  std::vector<double> frows;  // (q-1)*n

  void eval(const double* state, const double* delayed, double* out) const;
};

// Fixed-step RK4 solution of the unrolled system on the delay-aligned grid
// t_k = k*delta, delta = h/r, nodes k = -r .. steps. Node s in storage maps
// to grid index k = s - r. Dense output is cubic Hermite per grid cell.
//
// History derivatives (nodes k < 0) hold phi'; from k = 0 on, the stored
// derivative is the RK right-hand side at the node. The cell [-delta, 0]
// interpolates with the left-limit derivative at 0 kept in hist_deriv_end,
// because phi' and the closed-loop derivative generally disagree there.
struct UnrolledGrid {
  int n = 0;
  int q = 1;
  int r = 0;
  std::int64_t steps = 0;  // nodes above t = 0
  double delta = 0.0;
  double h = 0.0;

  std::vector<double> states;          // (r+1+steps) blocks of n*q
  std::vector<double> derivs;          // same layout
  std::vector<double> hist_deriv_end;  // n*q

  std::int64_t num_nodes() const { return r + 1 + steps; }
  double t_end() const { return static_cast<double>(steps) * delta; }
  const double* node(std::int64_t s) const { return states.data() + s * n * q; }
  const double* node_deriv(std::int64_t s) const { return derivs.data() + s * n * q; }

  // Hermite interpolation on node cell [s, s+1] at local coordinate u in [0,1].
  void eval_cell(std::int64_t s, double u, double* out) const;
  // Dense output at time t in [-h, t_end] (tolerance 1e-12 * h at the ends).
  void eval_time(double t, double* out) const;
};

// Integrates to the smallest grid time >= T. Throws NonfiniteState on
// overflow, with the first offending grid time.
UnrolledGrid unroll(const DelayedLinearRhs& rhs, const InitialFunction& phi,
                    double T, int r);

}  // namespace delayfb::detail
