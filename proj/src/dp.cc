#include "lfc/dp.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace lfc {

GainMatrix SolveDp(const TransformedCost& cost, const MatrixXd& theta,
                   const MatrixXd& omega, const DpConfig& config,
                   DpTrace* trace) {
  if (!(config.tolerance > 0.0) || config.max_iterations < 1) {
    throw ValidationError("dp: tolerance must be > 0 and max_iterations >= 1");
  }
  const auto q = theta.rows();
  const auto m = omega.cols();
  if (theta.cols() != q || omega.rows() != q || cost.q_w.rows() != q ||
      cost.r_cross.rows() != m || cost.r_cross.cols() != q ||
      cost.s_u.rows() != m) {
    throw ValidationError("dp: inconsistent problem dimensions");
  }

  MatrixXd sigma = MatrixXd::Zero(q, q);
  MatrixXd eta = cost.r_cross + 2.0 * omega.transpose() * sigma * theta;
  MatrixXd mu = Symmetrize(cost.s_u + omega.transpose() * sigma * omega);
  MatrixXd f = -0.5 * SolveSpd(mu, eta);

  const bool record = trace != nullptr;
  if (record) {
    *trace = DpTrace{};
    trace->sigma_trace.push_back(0.0);
  }

  double change = std::numeric_limits<double>::infinity();
  int k = 1;
  for (; k <= config.max_iterations; ++k) {
    const MatrixXd f_prev = f;
    sigma = Symmetrize(cost.q_w + theta.transpose() * sigma * theta +
                       f.transpose() * eta + f.transpose() * mu * f);
    mu = Symmetrize(cost.s_u + omega.transpose() * sigma * omega);
    eta = cost.r_cross + 2.0 * omega.transpose() * sigma * theta;
    f = -0.5 * SolveSpd(mu, eta);
    change = MaxAbs(f - f_prev);
    if (!AllFinite(f)) {
      throw NumericError("dp: recursion diverged (non-finite gain)");
    }
    if (record) {
      trace->sigma_trace.push_back(sigma.trace());
      if (q > 0) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(sigma,
                                                   Eigen::EigenvaluesOnly);
        trace->min_sigma_eigenvalue =
            std::min(trace->min_sigma_eigenvalue, es.eigenvalues()(0));
      }
    }
    if (change < config.tolerance) break;
  }
  const double residual = MaxAbs(2.0 * mu * f + eta);
  if (k > config.max_iterations) {
    throw DpNotConvergedError(
        "dp: max_iterations reached (last change " + std::to_string(change) +
            ")",
        f, residual);
  }
  if (record) {
    trace->iterations = k;
    trace->final_change = change;
    trace->stationarity_residual = residual;
  }

  GainMatrix gain;
  gain.f = f;
  gain.provenance = Provenance::kDp;
  gain.window = {1, 0, static_cast<int>(m)};
  gain.spectral_radius = SpectralRadius(theta + omega * f);
  return gain;
}

GainMatrix SolveDp(const PredictionForm& pred, const TransformedCost& cost,
                   const DpConfig& config, DpTrace* trace) {
  GainMatrix gain = SolveDp(cost, pred.theta, pred.omega, config, trace);
  gain.window = pred.window;
  return gain;
}

}  // namespace lfc
