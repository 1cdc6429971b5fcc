#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace delayfb {

// Linear plant with a single constant input delay:
//   x'(t) = A x(t) + B u(t - h),   y(t) = C x(t)
// driven by a static output feedback u = K y, so the closed loop is
//   x'(t) = A x(t) + (B K C) x(t - h).
struct DelaySystem {
  Eigen::MatrixXd A;  // n x n
  Eigen::MatrixXd B;  // n x m
  Eigen::MatrixXd C;  // p x n
  double h = 0.0;     // delay, > 0

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(C.rows()); }
};

struct Gain {
  Eigen::MatrixXd K;  // m x p
};

enum class ValidateCode {
  ok,
  dimension_mismatch,
  nonpositive_delay,
  nonfinite_entry,
};

const char* to_string(ValidateCode code);

// Checks the DelaySystem invariants: n,m,p >= 1, consistent shapes,
// h > 0, finite entries.
ValidateCode validate(const DelaySystem& sys);

// Throws std::invalid_argument naming the failed check.
void require_valid(const DelaySystem& sys);

// Delayed-term coefficient of the closed loop: D = B K C (n x n).
Eigen::MatrixXd delayed_matrix(const DelaySystem& sys, const Gain& gain);

// Evaluation outside [-h, 0] (resp. the trajectory span) beyond tolerance.
class OutOfDomain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integration overflow: a state entry left [-1e100, 1e100] or went non-finite.
class NonfiniteState : public std::runtime_error {
 public:
  NonfiniteState(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// Continuous initial history phi on [-h, 0].
//
// Three representations: a constant vector, an affine function
// phi(theta) = v0 + theta * v1, and a uniform sample grid over [-h, 0]
// interpolated by piecewise cubics (4-point Lagrange stencils, so
// polynomials up to degree 3 are reproduced exactly).
class InitialFunction {
 public:
  enum class Kind { constant, linear, sampled_grid };

  static InitialFunction constant(Eigen::VectorXd value, double h);
  // phi(theta) = v0 + theta * v1
  static InitialFunction linear(Eigen::VectorXd v0, Eigen::VectorXd v1, double h);
  // nodes: one column per grid point, uniformly spaced from theta = -h to 0.
  static InitialFunction sampled(Eigen::MatrixXd nodes, double h);

  // phi(theta) for theta in [-h, 0] (tolerance 1e-12 * h at the ends).
  Eigen::VectorXd eval(double theta) const;
  // d/dtheta of the representation; one-sided at the ends, and at theta = 0
  // the left limit (the side that exists).
  Eigen::VectorXd derivative(double theta) const;

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double delay() const { return h_; }

 private:
  InitialFunction() = default;

  Kind kind_ = Kind::constant;
  int dim_ = 0;
  double h_ = 0.0;
  Eigen::VectorXd v0_;
  Eigen::VectorXd v1_;      // linear only
  Eigen::MatrixXd nodes_;   // sampled only, dim x count
};

}  // namespace delayfb
