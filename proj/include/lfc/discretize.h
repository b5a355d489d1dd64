#pragma once

#include <functional>
#include <vector>

#include "lfc/model.h"

namespace lfc {

/// Zero-order-hold discretization: x[k+1] = Φ·x[k] + Δ·u[k], y[k] = C·x[k] + D·u[k].
struct DiscreteModel {
  MatrixXd phi;
  MatrixXd delta;
  MatrixXd c;
  MatrixXd d;
  double ts = 0.0;
  std::vector<std::string> state_labels;
  std::vector<std::string> input_labels;
  std::vector<std::string> output_labels;

  int states() const { return static_cast<int>(phi.rows()); }
  int inputs() const { return static_cast<int>(delta.cols()); }
  int outputs() const { return static_cast<int>(c.rows()); }
};

/// exp(A) by scaling and squaring of a truncated Taylor series.
MatrixXd MatrixExponential(const MatrixXd& a);

DiscreteModel Zoh(const StateSpaceModel& model, double ts);

/// Piecewise-constant input: value held over [k·ts, (k+1)·ts).
using SampledInput = std::function<VectorXd(int k)>;

/// Fixed-step classical RK4 for ẋ = A·x + B·u with u held constant.
VectorXd Rk4Step(const MatrixXd& a, const MatrixXd& b, const VectorXd& x,
                 const VectorXd& u, double dt);

/// Max over sample instants k = 1..K of ‖x_discrete[k] − x_fine[k]‖∞, with
/// the fine trajectory from RK4 at dt = ts/100 (K = round(horizon/ts)).
/// When `relative` is set each deviation is divided by max(1, ‖x_fine[k]‖∞).
double CheckAgainstIntegration(const StateSpaceModel& model,
                               const DiscreteModel& discrete, double horizon,
                               const SampledInput& input,
                               const VectorXd& x0 = VectorXd(),
                               bool relative = false);

}  // namespace lfc
