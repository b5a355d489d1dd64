#include "lfc/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace lfc {

bool AllFinite(const MatrixXd& m) { return m.array().isFinite().all(); }

double PowerIterationBound(const MatrixXd& a, int iterations) {
  // ‖A^k‖^(1/k) ≥ ρ(A) for every k, and tends to ρ(A). Repeated squaring
  // with renormalization keeps the powers representable.
  const double base = a.cwiseAbs().colwise().sum().maxCoeff();
  if (base == 0.0) return 0.0;
  MatrixXd m = a / base;
  double log_scale = std::log(base);
  double best = base;
  double exponent = 1.0;
  for (int j = 0; j < iterations; ++j) {
    m = m * m;
    exponent *= 2.0;
    log_scale *= 2.0;
    const double nrm = m.cwiseAbs().colwise().sum().maxCoeff();
    if (nrm == 0.0 || !std::isfinite(nrm)) return nrm == 0.0 ? 0.0 : best;
    m /= nrm;
    log_scale += std::log(nrm);
    best = std::min(best, std::exp(log_scale / exponent));
    if (exponent > 1e300) break;
  }
  return best;
}

double SpectralRadius(const MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw ValidationError("SpectralRadius: matrix must be square");
  }
  if (!AllFinite(a)) {
    throw ValidationError("SpectralRadius: non-finite entries");
  }
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  if (n == 1) return std::abs(a(0, 0));

  Eigen::RealSchur<MatrixXd> schur(n);
  schur.setMaxIterations(80 * n);
  schur.compute(a, /*computeU=*/false);
  if (schur.info() != Eigen::Success) {
    const double bound = PowerIterationBound(a, 60);
    throw EigenNotConvergedError(
        "SpectralRadius: QR iteration cap exceeded; best bound " +
            std::to_string(bound),
        bound);
  }

  // Quasi-triangular T: 1x1 blocks are real eigenvalues, 2x2 blocks carry a
  // complex pair whose modulus is sqrt(det).
  const MatrixXd& t = schur.matrixT();
  double rho = 0.0;
  for (Eigen::Index i = 0; i < n;) {
    if (i + 1 < n && t(i + 1, i) != 0.0) {
      const double p = 0.5 * (t(i, i) - t(i + 1, i + 1));
      const double disc = p * p + t(i, i + 1) * t(i + 1, i);
      if (disc >= 0.0) {
        const double mid = 0.5 * (t(i, i) + t(i + 1, i + 1));
        const double s = std::sqrt(disc);
        rho = std::max({rho, std::abs(mid + s), std::abs(mid - s)});
      } else {
        const double det =
            t(i, i) * t(i + 1, i + 1) - t(i, i + 1) * t(i + 1, i);
        rho = std::max(rho, std::sqrt(std::abs(det)));
      }
      i += 2;
    } else {
      rho = std::max(rho, std::abs(t(i, i)));
      i += 1;
    }
  }
  return rho;
}

MatrixXd DiscreteLyapunovSum(const MatrixXd& a, const MatrixXd& g,
                             double tolerance) {
  if (a.rows() != a.cols() || g.rows() != a.rows() || g.cols() != a.cols()) {
    throw ValidationError("DiscreteLyapunovSum: dimension mismatch");
  }
  MatrixXd p = g;
  MatrixXd power = a;
  for (int iter = 0; iter < 200; ++iter) {
    const MatrixXd increment = power.transpose() * p * power;
    p += increment;
    const double scale = std::max(1.0, MaxAbs(p));
    if (!AllFinite(p)) break;
    if (MaxAbs(increment) <= tolerance * scale) {
      return Symmetrize(p);
    }
    power = power * power;
  }
  throw NumericError(
      "DiscreteLyapunovSum: accumulation did not converge (unstable A?)");
}

MatrixXd SolveSpd(const MatrixXd& mu, const MatrixXd& b, double rcond_min) {
  Eigen::LLT<MatrixXd> llt(Symmetrize(mu));
  if (llt.info() != Eigen::Success) {
    throw NumericError("SolveSpd: matrix is not positive definite");
  }
  const double rcond = llt.rcond();
  if (!(rcond >= rcond_min)) {
    throw NumericError("SolveSpd: matrix is numerically singular (rcond " +
                       std::to_string(rcond) + ")");
  }
  return llt.solve(b);
}

bool IsSymmetricPositiveDefinite(const MatrixXd& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  const double scale = std::max(1.0, MaxAbs(m));
  if (MaxAbs(m - m.transpose()) > tol * scale) return false;
  Eigen::LLT<MatrixXd> llt(Symmetrize(m));
  return llt.info() == Eigen::Success;
}

int NumericalRank(const MatrixXd& m, double relative_threshold) {
  if (m.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(m);
  qr.setThreshold(relative_threshold);
  return static_cast<int>(qr.rank());
}

}  // namespace lfc
