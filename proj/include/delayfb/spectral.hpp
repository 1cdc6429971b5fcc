#pragma once

#include <complex>
#include <vector>

#include "delayfb/system.hpp"

namespace delayfb {

// Rightmost characteristic roots of x'(t) = A x(t) + D x(t-h), estimated from
// a Chebyshev collocation of the solution-semigroup generator. `converged`
// means the retained roots agreed across two discretization orders.
struct SpectralReport {
  int order = 0;  // higher of the two orders used
  std::vector<std::complex<double>> rightmost_roots;
  double abscissa = 0.0;  // max real part over rightmost_roots
  bool converged = false;
  bool stable = false;  // converged and abscissa < -margin
};

// Collocation matrix on Chebyshev-Gauss-Lobatto nodes theta_0 = 0 > ... >
// theta_N = -h: rows for nodes 1..N differentiate along the history, the
// node-0 row applies the boundary condition A x(0) + D x(-h). Size (N+1)n.
Eigen::MatrixXd generator_matrix(const DelaySystem& sys, const Gain& gain,
                                 int order);

// Eigenvalues of generator_matrix at orders N and ceil(1.5 N); keeps the
// q largest-real-part roots of each and declares convergence when they match
// pairwise within 1e-6. The report's stable flag uses margin 0.
SpectralReport spectral_abscissa(const DelaySystem& sys, const Gain& gain,
                                 int order, int q = 10);

struct StabilityCheck {
  bool stable = false;
  SpectralReport report;
};

// Escalates the order through {16, 24, 36} until the root sets converge;
// stable iff converged and abscissa < -margin. Never throws on an
// unconverged discretization (reports stable = false instead).
StabilityCheck is_stable(const DelaySystem& sys, const Gain& gain,
                         double margin);

}  // namespace delayfb
