// Test-only reference implementations, independent of the library's
// integration / eigenvalue code paths.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace oracles {

// Exact solution of the scalar pure-delay equation x'(t) = d * x(t - 1) with
// polynomial history phi on [-1, 0], by symbolic method of steps: on each
// interval [k, k+1] the solution is the polynomial
//   q_{k+1}(u) = x(k) + d * \int_0^u q_k(v) dv,   u = t - k in [0, 1].
// Coefficients are monomial in the local variable.
class PureDelayPoly {
 public:
  PureDelayPoly(double d, std::vector<double> history_coeffs)
      : d_(d), pieces_{std::move(history_coeffs)} {}

  double eval(double t) const {
    if (t < -1.0) throw std::out_of_range("t < -1");
    const int k = std::min<int>(static_cast<int>(std::floor(t)),
                                static_cast<int>(1e9));
    extend(k + 1);
    // piece index k+1 covers [k, k+1); history piece 0 covers [-1, 0)
    const int idx = std::max(k + 1, 0);
    const double u = t - std::floor(t);
    return idx == 0 ? horner(pieces_[0], t + 1.0) : horner(pieces_[idx], u);
  }

 private:
  static double horner(const std::vector<double>& c, double u) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
  }

  void extend(int pieces_needed) const {
    while (static_cast<int>(pieces_.size()) <= pieces_needed) {
      const std::vector<double>& prev = pieces_.back();
      const double xk = horner(prev, 1.0);
      std::vector<double> next(prev.size() + 1, 0.0);
      next[0] = xk;
      for (size_t i = 0; i < prev.size(); ++i) {
        next[i + 1] = d_ * prev[i] / static_cast<double>(i + 1);
      }
      pieces_.push_back(std::move(next));
    }
  }

  double d_;
  // pieces_[0] is the history polynomial in (t + 1); pieces_[k] for k >= 1
  // covers [k-1, k] in the local variable u = t - (k - 1)
  mutable std::vector<std::vector<double>> pieces_;
};

// Matrix exponential by scaling-and-squaring over a plain Taylor series.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& mat) {
  const double norm = mat.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.5) ++squarings;
  const Eigen::MatrixXd scaled = mat / std::pow(2.0, squarings);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(mat.rows(), mat.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 24; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// Newton iteration for a characteristic root of lambda - a - d e^{-lambda h}.
inline std::complex<double> characteristic_root(double a, double d, double h,
                                                std::complex<double> start) {
  std::complex<double> lambda = start;
  for (int it = 0; it < 100; ++it) {
    const std::complex<double> expterm = std::exp(-lambda * h);
    const std::complex<double> f = lambda - a - d * expterm;
    const std::complex<double> df = 1.0 + d * h * expterm;
    const std::complex<double> step = f / df;
    lambda -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return lambda;
}

// Rightmost characteristic root of the scalar loop x' = a x + d x(t - h),
// located by Newton from a grid of starting points.
inline double scalar_abscissa(double a, double d, double h) {
  double best = -std::numeric_limits<double>::infinity();
  for (double sigma = -8.0; sigma <= 8.0; sigma += 0.5) {
    for (double omega = 0.0; omega <= 40.0 / h; omega += 0.25 / h) {
      const auto root = characteristic_root(a, d, h, {sigma, omega});
      const auto residual =
          root - a - d * std::exp(-root * h);
      if (std::abs(residual) < 1e-8 && std::isfinite(root.real())) {
        best = std::max(best, root.real());
      }
    }
  }
  return best;
}

// Stability window of d for x' = a x + d x(t - 1), a < 1: the real-root
// boundary is d = -a, the complex-crossing boundary is d = -omega / sin(omega)
// with omega solving omega * cot(omega) = a on (0, pi).
inline std::pair<double, double> hayes_window(double a) {
  double lo = 1e-9, hi = M_PI - 1e-9;
  auto f = [a](double w) { return w * std::cos(w) / std::sin(w) - a; };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double omega = 0.5 * (lo + hi);
  return {-omega / std::sin(omega), -a};
}

}  // namespace oracles
