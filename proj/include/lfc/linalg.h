#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lfc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Thrown when inputs violate a documented precondition (dimensions,
/// parameter ranges, malformed configuration).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a numerical procedure fails (non-convergence, singularity,
/// instability where stability is required).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by SpectralRadius when the QR iteration hits its cap. Carries the
/// best available upper bound on the spectral radius.
class EigenNotConvergedError : public NumericError {
 public:
  EigenNotConvergedError(const std::string& what, double bound)
      : NumericError(what), bound_(bound) {}
  double bound() const { return bound_; }

 private:
  double bound_;
};

/// Magnitude of the largest eigenvalue of a square matrix. Uses a
/// Hessenberg reduction followed by Francis double-shift QR sweeps.
double SpectralRadius(const MatrixXd& a);

/// Power-iteration estimate of the spectral radius; used as the fallback
/// bound when QR fails to converge.
double PowerIterationBound(const MatrixXd& a, int iterations = 500);

/// Solves P = G + Aᵀ·P·A for a Schur-stable A by doubling accumulation of
/// Σ (Aᵀ)^k G A^k. Requires ρ(A) < 1; the caller is responsible for
/// checking stability beforehand.
MatrixXd DiscreteLyapunovSum(const MatrixXd& a, const MatrixXd& g,
                             double tolerance = 1e-10);

/// Solves μ·X = B for symmetric positive definite μ. Throws NumericError
/// when μ is not positive definite or its reciprocal condition estimate
/// falls below `rcond_min`.
MatrixXd SolveSpd(const MatrixXd& mu, const MatrixXd& b,
                  double rcond_min = 1e-12);

/// True when `m` is symmetric to `tol` and its Cholesky factorization
/// succeeds.
bool IsSymmetricPositiveDefinite(const MatrixXd& m, double tol = 1e-10);

/// Numerical rank via column-pivoted QR with a relative threshold.
int NumericalRank(const MatrixXd& m, double relative_threshold = 1e-10);

/// Symmetrized copy (M + Mᵀ)/2.
inline MatrixXd Symmetrize(const MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

/// Largest absolute entry; zero for empty matrices.
inline double MaxAbs(const MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool AllFinite(const MatrixXd& m);

}  // namespace lfc
