#pragma once

// Linear time-invariant plants x' = Ax + Bu, the Kalman controllability
// test, and the controllability Gramian
//
//   W(0,t) = integral_0^t e^{-A s} B B^T e^{-A^T s} ds.
//
// The Gramian is evaluated through the exponential of the 2n x 2n block
// matrix [[-A, BB^T], [0, A^T]]: if e^{Ht} = [[F, G], [0, F2]] then
// W(0,t) = G F^T. A composite-Simpson quadrature of the defining integral
// is kept alongside as an independent test oracle.

#include "liouctrl/matops.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace liouctrl {

class LtiSystem {
 public:
  LtiSystem(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
    require_square(a_, "LtiSystem.A");
    require_finite(a_, "LtiSystem.A");
    require_finite(b_, "LtiSystem.B");
    if (b_.rows() != a_.rows() || b_.cols() == 0) {
      throw std::invalid_argument("LtiSystem.B: expected " + std::to_string(a_.rows()) +
                                  " rows, got " + std::to_string(b_.rows()) + "x" +
                                  std::to_string(b_.cols()));
    }
  }

  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  Eigen::Index state_dim() const { return a_.rows(); }
  Eigen::Index input_dim() const { return b_.cols(); }

 private:
  Matrix a_;
  Matrix b_;
};

/// The n x (n m) block matrix [B, AB, ..., A^{n-1}B].
inline Matrix kalman_matrix(const LtiSystem& sys) {
  const auto n = sys.state_dim();
  const auto m = sys.input_dim();
  Matrix k(n, n * m);
  Matrix block = sys.B();
  for (Eigen::Index i = 0; i < n; ++i) {
    k.middleCols(i * m, m) = block;
    block = sys.A() * block;
  }
  return k;
}

struct ControllabilityReport {
  bool controllable = false;
  double min_sv = 0.0;  // smallest singular value of the Kalman matrix
  double max_sv = 0.0;  // largest singular value of the Kalman matrix
};

/// Numerical rank test on the Kalman matrix: controllable iff the smallest
/// singular value exceeds tol times the largest.
inline ControllabilityReport controllability_check(const LtiSystem& sys, double tol = 1e-10) {
  if (tol <= 0.0) {
    throw std::invalid_argument("controllability_check: tol must be positive");
  }
  Eigen::JacobiSVD<Matrix> svd(kalman_matrix(sys));
  ControllabilityReport rep;
  rep.max_sv = svd.singularValues()(0);
  rep.min_sv = svd.singularValues().tail(1)(0);
  rep.controllable = rep.min_sv > tol * rep.max_sv;
  return rep;
}

/// Controllability Gramian W(0,t) by the block-augmented matrix exponential.
inline SpdMatrix gramian(const LtiSystem& sys, double t, const Tolerances& tol = {}) {
  if (t < 0.0) {
    throw std::invalid_argument("gramian: t must be nonnegative, got " + std::to_string(t));
  }
  const auto n = sys.state_dim();
  if (t == 0.0) {
    return SpdMatrix::from_computation(Matrix::Zero(n, n), tol);
  }
  Matrix h = Matrix::Zero(2 * n, 2 * n);
  h.topLeftCorner(n, n) = -sys.A();
  h.topRightCorner(n, n) = sys.B() * sys.B().transpose();
  h.bottomRightCorner(n, n) = sys.A().transpose();
  const Matrix e = expm(Matrix(t * h), tol);
  // e = [[e^{-At}, G], [0, e^{A^T t}]] with G = W(0,t) e^{A^T t}.
  Matrix w = e.topRightCorner(n, n) * e.topLeftCorner(n, n).transpose();
  return SpdMatrix::from_computation(std::move(w), tol);
}

/// Composite-Simpson quadrature of the Gramian integral; O(steps^-4) error.
/// Retained purely as an independent cross-check of gramian().
inline SpdMatrix gramian_quadrature_oracle(const LtiSystem& sys, double t, int steps,
                                           const Tolerances& tol = {}) {
  if (t < 0.0) {
    throw std::invalid_argument("gramian_quadrature_oracle: t must be nonnegative");
  }
  if (steps < 16) {
    throw std::invalid_argument("gramian_quadrature_oracle: steps must be >= 16");
  }
  const auto n = sys.state_dim();
  if (t == 0.0) {
    return SpdMatrix::from_computation(Matrix::Zero(n, n), tol);
  }
  if (steps % 2 != 0) {
    ++steps;  // Simpson needs an even subinterval count
  }
  const double h = t / steps;
  auto integrand = [&](double s) -> Matrix {
    const Matrix e = expm(Matrix(-s * sys.A()), tol) * sys.B();
    return e * e.transpose();
  };
  Matrix acc = integrand(0.0) + integrand(t);
  for (int i = 1; i < steps; ++i) {
    acc += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * h);
  }
  return SpdMatrix::from_computation(Matrix(acc * (h / 3.0)), tol);
}

/// Gramians precomputed on a uniform time grid 0 = t_0 < ... < t_L = T.
/// Immutable after construction; W(0,s) <= W(0,t) in the PSD order along the
/// grid, which min_monotonicity_gap() quantifies.
class GramianTable {
 public:
  GramianTable(LtiSystem sys, double horizon, int intervals, const Tolerances& tol = {})
      : sys_(std::move(sys)), horizon_(horizon) {
    if (horizon <= 0.0) {
      throw std::invalid_argument("gramian_table: horizon must be positive");
    }
    if (intervals < 2) {
      throw std::invalid_argument("gramian_table: need at least 2 intervals");
    }
    times_.reserve(intervals + 1);
    values_.reserve(intervals + 1);
    for (int i = 0; i <= intervals; ++i) {
      const double t = horizon * i / intervals;
      times_.push_back(t);
      values_.push_back(gramian(sys_, t, tol));
    }
  }

  const LtiSystem& system() const { return sys_; }
  double horizon() const { return horizon_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<SpdMatrix>& values() const { return values_; }

  /// Smallest eigenvalue of W(0,t_{i+1}) - W(0,t_i) over the grid; PSD
  /// monotonicity of the table means this stays above a small negative slack.
  double min_monotonicity_gap() const {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(
          Matrix(values_[i + 1].matrix() - values_[i].matrix()));
      gap = std::min(gap, eig.eigenvalues().minCoeff());
    }
    return gap;
  }

 private:
  LtiSystem sys_;
  double horizon_;
  std::vector<double> times_;
  std::vector<SpdMatrix> values_;
};

inline GramianTable gramian_table(const LtiSystem& sys, double horizon, int intervals,
                                  const Tolerances& tol = {}) {
  return GramianTable(sys, horizon, intervals, tol);
}

}  // namespace liouctrl
