#include "delayfb/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace delayfb {

namespace {

// Chebyshev-Gauss-Lobatto differentiation matrix for nodes
// x_j = cos(j pi / N), j = 0..N (decreasing from 1 to -1), with the
// negative-sum trick for the diagonal.
Eigen::MatrixXd chebyshev_diff(int N) {
  const int size = N + 1;
  Eigen::VectorXd x(size);
  for (int j = 0; j <= N; ++j) x[j] = std::cos(M_PI * j / N);
  Eigen::VectorXd c = Eigen::VectorXd::Ones(size);
  c[0] = 2.0;
  c[N] = 2.0;
  Eigen::MatrixXd D(size, size);
  for (int i = 0; i <= N; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j <= N; ++j) {
      if (i == j) continue;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      D(i, j) = (c[i] / c[j]) * sign / (x[i] - x[j]);
      rowsum += D(i, j);
    }
    D(i, i) = -rowsum;
  }
  return D;
}

std::vector<std::complex<double>> rightmost_of(
    const Eigen::MatrixXd& mat, int q) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(mat, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigen-solve failure");
  }
  std::vector<std::complex<double>> roots(solver.eigenvalues().data(),
                                          solver.eigenvalues().data() +
                                              solver.eigenvalues().size());
  std::sort(roots.begin(), roots.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() > b.real();
              return a.imag() > b.imag();
            });
  roots.resize(std::min<size_t>(roots.size(), static_cast<size_t>(q)));
  return roots;
}

// Greedy nearest matching of the reference set against candidates; returns
// the largest pairing distance.
double match_distance(const std::vector<std::complex<double>>& reference,
                      const std::vector<std::complex<double>>& candidates) {
  double worst = 0.0;
  std::vector<bool> used(candidates.size(), false);
  for (const auto& root : reference) {
    double best = std::numeric_limits<double>::infinity();
    size_t pick = candidates.size();
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (used[i]) continue;
      const double dist = std::abs(root - candidates[i]);
      if (dist < best) {
        best = dist;
        pick = i;
      }
    }
    if (pick == candidates.size()) return std::numeric_limits<double>::infinity();
    used[pick] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

Eigen::MatrixXd generator_matrix(const DelaySystem& sys, const Gain& gain,
                                 int order) {
  require_valid(sys);
  if (order < 2) throw std::invalid_argument("collocation order must be >= 2");
  const int n = sys.n();
  const Eigen::MatrixXd D = delayed_matrix(sys, gain);

  // nodes theta = (h/2)(x - 1) map [1, -1] onto [0, -h]; d/dtheta = (2/h) d/dx
  const Eigen::MatrixXd diff = chebyshev_diff(order) * (2.0 / sys.h);

  const int size = (order + 1) * n;
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(size, size);
  for (int i = 1; i <= order; ++i) {
    for (int j = 0; j <= order; ++j) {
      gen.block(i * n, j * n, n, n) =
          diff(i, j) * Eigen::MatrixXd::Identity(n, n);
    }
  }
  gen.block(0, 0, n, n) = sys.A;
  gen.block(0, order * n, n, n) += D;
  return gen;
}

SpectralReport spectral_abscissa(const DelaySystem& sys, const Gain& gain,
                                 int order, int q) {
  if (order < 8) throw std::invalid_argument("order must be >= 8");
  const int higher = static_cast<int>(std::ceil(1.5 * order));

  SpectralReport report;
  report.order = higher;
  try {
    const Eigen::MatrixXd low = generator_matrix(sys, gain, order);
    const Eigen::MatrixXd high = generator_matrix(sys, gain, higher);
    const int keep = std::min<int>(
        q, static_cast<int>(std::min(low.rows(), high.rows())));
    const auto low_roots = rightmost_of(low, keep);
    const auto high_roots = rightmost_of(high, keep);
    report.rightmost_roots = high_roots;
    report.converged = match_distance(high_roots, low_roots) <= 1e-6;
  } catch (const std::runtime_error&) {
    report.converged = false;
    report.stable = false;
    return report;
  }
  report.abscissa = -std::numeric_limits<double>::infinity();
  for (const auto& root : report.rightmost_roots) {
    report.abscissa = std::max(report.abscissa, root.real());
  }
  report.stable = report.converged && report.abscissa < 0.0;
  return report;
}

StabilityCheck is_stable(const DelaySystem& sys, const Gain& gain,
                         double margin) {
  if (!(margin > 0.0)) throw std::invalid_argument("margin must be positive");
  StabilityCheck check;
  for (int order : {16, 24, 36}) {
    check.report = spectral_abscissa(sys, gain, order);
    if (check.report.converged) {
      check.stable = check.report.abscissa < -margin;
      check.report.stable = check.stable;
      return check;
    }
  }
  check.stable = false;
  check.report.stable = false;
  return check;
}

}  // namespace delayfb
