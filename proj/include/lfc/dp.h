#pragma once

#include <utility>

#include "lfc/ofc.h"

namespace lfc {

struct DpConfig {
  double tolerance = 1e-8;  // max-abs change of F between iterations
  int max_iterations = 100000;
};

/// Raised when the recursion hits max_iterations; carries the last iterate.
class DpNotConvergedError : public NumericError {
 public:
  DpNotConvergedError(const std::string& what, MatrixXd last, double residual)
      : NumericError(what), last_(std::move(last)), residual_(residual) {}
  const MatrixXd& last_gain() const { return last_; }
  double residual() const { return residual_; }

 private:
  MatrixXd last_;
  double residual_;
};

struct DpTrace {
  int iterations = 0;
  double final_change = 0.0;
  double stationarity_residual = 0.0;  // ‖2·μ·F + η‖max at exit
  std::vector<double> sigma_trace;     // trace(σ) per iteration
  double min_sigma_eigenvalue = 0.0;   // over all iterations
};

/// Backward multi-stage recursion on the history-space LQ problem:
///   σ ← 0;  η = R + 2Ωᵀσθ;  μ = S + ΩᵀσΩ;  F = −½ μ⁻¹ η
///   repeat: σ ← Q + θᵀσθ + Fᵀη + FᵀμF, refresh μ, η, F
/// until max|F − F_prev| < tolerance. The converged F is returned for the
/// u = F·w convention.
GainMatrix SolveDp(const TransformedCost& cost, const MatrixXd& theta,
                   const MatrixXd& omega, const DpConfig& config = {},
                   DpTrace* trace = nullptr);

/// Convenience overload that also attaches the prediction window.
GainMatrix SolveDp(const PredictionForm& pred, const TransformedCost& cost,
                   const DpConfig& config = {}, DpTrace* trace = nullptr);

}  // namespace lfc
