#include "delayfb/system.hpp"

#include <cmath>
#include <sstream>

namespace delayfb {

const char* to_string(ValidateCode code) {
  switch (code) {
    case ValidateCode::ok: return "ok";
    case ValidateCode::dimension_mismatch: return "dimension-mismatch";
    case ValidateCode::nonpositive_delay: return "nonpositive-delay";
    case ValidateCode::nonfinite_entry: return "nonfinite-entry";
  }
  return "unknown";
}

ValidateCode validate(const DelaySystem& sys) {
  const auto n = sys.A.rows();
  if (n < 1 || sys.A.cols() != n) return ValidateCode::dimension_mismatch;
  if (sys.B.rows() != n || sys.B.cols() < 1) return ValidateCode::dimension_mismatch;
  if (sys.C.cols() != n || sys.C.rows() < 1) return ValidateCode::dimension_mismatch;
  if (!(sys.h > 0.0)) return ValidateCode::nonpositive_delay;
  if (!std::isfinite(sys.h) || !sys.A.allFinite() || !sys.B.allFinite() ||
      !sys.C.allFinite()) {
    return ValidateCode::nonfinite_entry;
  }
  return ValidateCode::ok;
}

void require_valid(const DelaySystem& sys) {
  const ValidateCode code = validate(sys);
  if (code != ValidateCode::ok) {
    std::ostringstream oss;
    oss << "invalid DelaySystem: " << to_string(code);
    throw std::invalid_argument(oss.str());
  }
}

Eigen::MatrixXd delayed_matrix(const DelaySystem& sys, const Gain& gain) {
  if (gain.K.rows() != sys.m() || gain.K.cols() != sys.p()) {
    throw std::invalid_argument("dimension-mismatch: gain is " +
                                std::to_string(gain.K.rows()) + "x" +
                                std::to_string(gain.K.cols()) + ", expected " +
                                std::to_string(sys.m()) + "x" +
                                std::to_string(sys.p()));
  }
  return sys.B * gain.K * sys.C;
}

namespace {

void require_finite(const Eigen::MatrixXd& mat, const char* what) {
  if (!mat.allFinite()) {
    throw std::invalid_argument(std::string("nonfinite-entry in ") + what);
  }
}

void require_delay(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("nonpositive-delay: initial function needs h > 0");
  }
}

}  // namespace

InitialFunction InitialFunction::constant(Eigen::VectorXd value, double h) {
  require_delay(h);
  require_finite(value, "constant history");
  if (value.size() < 1) throw std::invalid_argument("empty history vector");
  InitialFunction phi;
  phi.kind_ = Kind::constant;
  phi.dim_ = static_cast<int>(value.size());
  phi.h_ = h;
  phi.v0_ = std::move(value);
  return phi;
}

InitialFunction InitialFunction::linear(Eigen::VectorXd v0, Eigen::VectorXd v1,
                                        double h) {
  require_delay(h);
  require_finite(v0, "linear history v0");
  require_finite(v1, "linear history v1");
  if (v0.size() < 1 || v1.size() != v0.size()) {
    throw std::invalid_argument("dimension-mismatch in linear history");
  }
  InitialFunction phi;
  phi.kind_ = Kind::linear;
  phi.dim_ = static_cast<int>(v0.size());
  phi.h_ = h;
  phi.v0_ = std::move(v0);
  phi.v1_ = std::move(v1);
  return phi;
}

InitialFunction InitialFunction::sampled(Eigen::MatrixXd nodes, double h) {
  require_delay(h);
  require_finite(nodes, "sampled history");
  if (nodes.rows() < 1 || nodes.cols() < 2) {
    throw std::invalid_argument("sampled history needs >= 2 grid columns");
  }
  InitialFunction phi;
  phi.kind_ = Kind::sampled_grid;
  phi.dim_ = static_cast<int>(nodes.rows());
  phi.h_ = h;
  phi.nodes_ = std::move(nodes);
  return phi;
}

namespace {

// Clamp theta into [-h, 0] with tolerance 1e-12 * h, else report.
double clamp_theta(double theta, double h) {
  const double tol = 1e-12 * h;
  if (theta < -h - tol || theta > tol) {
    std::ostringstream oss;
    oss << "out-of-domain: theta = " << theta << " outside [" << -h << ", 0]";
    throw OutOfDomain(oss.str());
  }
  return std::min(0.0, std::max(-h, theta));
}

}  // namespace

Eigen::VectorXd InitialFunction::eval(double theta) const {
  theta = clamp_theta(theta, h_);
  switch (kind_) {
    case Kind::constant:
      return v0_;
    case Kind::linear:
      return v0_ + theta * v1_;
    case Kind::sampled_grid:
      break;
  }
  const Eigen::Index count = nodes_.cols();
  const double spacing = h_ / static_cast<double>(count - 1);
  // position measured from theta = -h in grid units
  double u = (theta + h_) / spacing;
  Eigen::Index cell = static_cast<Eigen::Index>(std::floor(u));
  cell = std::min(std::max(cell, Eigen::Index{0}), count - 2);
  // 4-point stencil around the cell, clamped at the ends
  const Eigen::Index width = std::min<Eigen::Index>(4, count);
  Eigen::Index first = std::min(std::max(cell - 1, Eigen::Index{0}), count - width);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  for (Eigen::Index a = 0; a < width; ++a) {
    double weight = 1.0;
    for (Eigen::Index b = 0; b < width; ++b) {
      if (b == a) continue;
      weight *= (u - static_cast<double>(first + b)) /
                static_cast<double>(a - b);
    }
    out += weight * nodes_.col(first + a);
  }
  return out;
}

Eigen::VectorXd InitialFunction::derivative(double theta) const {
  theta = clamp_theta(theta, h_);
  switch (kind_) {
    case Kind::constant:
      return Eigen::VectorXd::Zero(dim_);
    case Kind::linear:
      return v1_;
    case Kind::sampled_grid:
      break;
  }
  const Eigen::Index count = nodes_.cols();
  const double spacing = h_ / static_cast<double>(count - 1);
  double u = (theta + h_) / spacing;
  Eigen::Index cell = static_cast<Eigen::Index>(std::floor(u));
  // at theta = 0 take the left cell, so this is the left-limit derivative
  cell = std::min(std::max(cell, Eigen::Index{0}), count - 2);
  const Eigen::Index width = std::min<Eigen::Index>(4, count);
  Eigen::Index first = std::min(std::max(cell - 1, Eigen::Index{0}), count - width);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  for (Eigen::Index a = 0; a < width; ++a) {
    // d/du of the Lagrange basis polynomial at node a
    double dweight = 0.0;
    for (Eigen::Index c = 0; c < width; ++c) {
      if (c == a) continue;
      double term = 1.0 / static_cast<double>(a - c);
      for (Eigen::Index b = 0; b < width; ++b) {
        if (b == a || b == c) continue;
        term *= (u - static_cast<double>(first + b)) /
                static_cast<double>(a - b);
      }
      dweight += term;
    }
    out += dweight * nodes_.col(first + a);
  }
  return out / spacing;
}

}  // namespace delayfb
