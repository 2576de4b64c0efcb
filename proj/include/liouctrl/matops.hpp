#pragma once

// Dense matrix kernels shared by the whole toolkit: matrix exponential,
// SPD square roots, singular values, spectral radius. Everything is a pure
// function of its inputs and safe to call concurrently.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace liouctrl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Numerical tolerances used across the toolkit, collected in one record so
/// callers (and tests) can tighten or relax them in one place.
struct Tolerances {
  double symmetry_rel = 1e-12;        // symmetry check, relative to matrix scale
  double psd_rel = 1e-12;             // eigenvalue floor, relative to lambda_max
  double psd_clip_abs = 1e-10;        // clip window for PSD-by-construction results
  double controllability_rel = 1e-10; // numerical rank threshold for the Kalman matrix
  double expm_norm_limit = 700.0;     // inf-norm beyond which exp() is reported as overflow
};

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": entries must be finite");
  }
}

inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

class NotSpdError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A validated symmetric positive-semidefinite matrix. Construction checks
/// symmetry (relative to the matrix scale) and the eigenvalue floor; the
/// extreme eigenvalues are kept around since most consumers need them.
class SpdMatrix {
 public:
  SpdMatrix() = default;

  /// Strict validation per the type contract: eigenvalues >= -psd_rel * lambda_max.
  static SpdMatrix from_matrix(Matrix s, const Tolerances& tol = {}) {
    return SpdMatrix(std::move(s), tol, /*clip=*/false);
  }

  /// For matrices that are PSD by construction up to roundoff (Gramians,
  /// eigenvector reassemblies): eigenvalues inside a small absolute window
  /// below zero are clipped to zero, anything worse still throws.
  static SpdMatrix from_computation(Matrix s, const Tolerances& tol = {}) {
    return SpdMatrix(std::move(s), tol, /*clip=*/true);
  }

  const Matrix& matrix() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }
  double min_eigenvalue() const { return eig_min_; }
  double max_eigenvalue() const { return eig_max_; }

 private:
  SpdMatrix(Matrix s, const Tolerances& tol, bool clip) {
    require_square(s, "SpdMatrix");
    require_finite(s, "SpdMatrix");
    const double scale = s.cwiseAbs().maxCoeff();
    const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > tol.symmetry_rel * scale) {
      throw NotSpdError("SpdMatrix: matrix is not symmetric (relative asymmetry " +
                        std::to_string(asym / scale) + ")");
    }
    mat_ = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(mat_);
    eig_min_ = eig.eigenvalues().minCoeff();
    eig_max_ = eig.eigenvalues().maxCoeff();
    const double floor = clip ? tol.psd_clip_abs * std::max(1.0, eig_max_)
                              : tol.psd_rel * std::max(eig_max_, 0.0);
    if (eig_min_ < -floor) {
      throw NotSpdError("SpdMatrix: not PSD, min eigenvalue " + std::to_string(eig_min_) +
                        " vs max " + std::to_string(eig_max_));
    }
    if (clip && eig_min_ < 0.0) {
      Vector lam = eig.eigenvalues().cwiseMax(0.0);
      mat_ = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
      mat_ = 0.5 * (mat_ + mat_.transpose());
      eig_min_ = 0.0;
    }
  }

  Matrix mat_;
  double eig_min_ = 0.0;
  double eig_max_ = 0.0;
};

/// Matrix exponential e^M (scaling-and-squaring with a degree-13 rational
/// approximant, as provided by Eigen). Overflow for extreme norms is
/// reported as a range error rather than returned as Inf.
inline Matrix expm(const Matrix& m, const Tolerances& tol = {}) {
  require_square(m, "expm");
  require_finite(m, "expm");
  const double norm_inf = m.cwiseAbs().rowwise().sum().maxCoeff();
  if (norm_inf > tol.expm_norm_limit) {
    throw std::range_error("expm: matrix norm " + std::to_string(norm_inf) +
                           " exceeds the overflow guard");
  }
  Matrix e = m.exp();
  if (!e.allFinite()) {
    throw std::range_error("expm: result overflowed");
  }
  return e;
}

/// Symmetric PSD square root R with R*R = S, computed from the symmetric
/// eigendecomposition. Eigenvalues in [-psd_rel*lambda_max, 0) are clipped
/// to zero; W(0,t) at small t is near-singular and would otherwise trip
/// spurious failures.
inline SpdMatrix spd_sqrt(const SpdMatrix& s, const Tolerances& tol = {}) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s.matrix());
  Vector lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Matrix r = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
  return SpdMatrix::from_computation(std::move(r), tol);
}

/// Convenience overload validating a plain matrix first; signals "not PSD"
/// for inputs with an eigenvalue below -psd_rel * lambda_max.
inline SpdMatrix spd_sqrt(const Matrix& s, const Tolerances& tol = {}) {
  return spd_sqrt(SpdMatrix::from_matrix(s, tol), tol);
}

/// Square root, inverse square root and inverse of a strictly positive
/// definite matrix from a single eigendecomposition. Throws NotSpdError when
/// the matrix is singular at the psd_rel scale.
struct SpdFactors {
  Matrix sqrt;
  Matrix sqrt_inv;
  Matrix inv;
  double eig_min = 0.0;
  double eig_max = 0.0;
};

inline SpdFactors spd_factors(const SpdMatrix& s, const Tolerances& tol = {}) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s.matrix());
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo <= tol.psd_rel * std::max(hi, 0.0) || lo <= 0.0) {
    throw NotSpdError("spd_factors: matrix is singular (min eigenvalue " + std::to_string(lo) +
                      "), cannot form inverse square root");
  }
  SpdFactors f;
  f.eig_min = lo;
  f.eig_max = hi;
  const Matrix& q = eig.eigenvectors();
  Vector sq = eig.eigenvalues().cwiseSqrt();
  f.sqrt = q * sq.asDiagonal() * q.transpose();
  f.sqrt_inv = q * sq.cwiseInverse().asDiagonal() * q.transpose();
  f.inv = q * eig.eigenvalues().cwiseInverse().asDiagonal() * q.transpose();
  f.sqrt = 0.5 * (f.sqrt + f.sqrt.transpose());
  f.sqrt_inv = 0.5 * (f.sqrt_inv + f.sqrt_inv.transpose());
  f.inv = 0.5 * (f.inv + f.inv.transpose());
  return f;
}

struct NormRadius {
  double norm = 0.0;    // largest singular value
  double radius = 0.0;  // largest eigenvalue modulus
};

/// Operator 2-norm and spectral radius of a square matrix. The spectral
/// radius never exceeds the norm (up to roundoff), which is exactly the gap
/// the steering diagnostic is after.
inline NormRadius norm_and_radius(const Matrix& m) {
  require_square(m, "norm_and_radius");
  require_finite(m, "norm_and_radius");
  NormRadius out;
  Eigen::JacobiSVD<Matrix> svd(m);
  out.norm = svd.singularValues()(0);
  Eigen::EigenSolver<Matrix> eig(m, /*computeEigenvectors=*/false);
  out.radius = eig.eigenvalues().cwiseAbs().maxCoeff();
  return out;
}

/// Smallest singular value of a (possibly rectangular) matrix.
inline double min_singular_value(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw std::invalid_argument("min_singular_value: empty matrix");
  }
  require_finite(m, "min_singular_value");
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().tail(1)(0);
}

}  // namespace liouctrl
