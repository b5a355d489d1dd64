#include "lfc/discretize.h"

#include <cmath>
#include <limits>

namespace lfc {

MatrixXd MatrixExponential(const MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw ValidationError("MatrixExponential: matrix must be square");
  }
  if (!AllFinite(a)) {
    throw ValidationError("MatrixExponential: non-finite entries");
  }
  const Eigen::Index n = a.rows();
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  const MatrixXd scaled = a / std::ldexp(1.0, squarings);

  // With ‖scaled‖ ≤ 1/2 the Taylor tail after 20 terms is below 1e-25.
  MatrixXd result = MatrixXd::Identity(n, n);
  MatrixXd term = MatrixXd::Identity(n, n);
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() <=
        std::numeric_limits<double>::epsilon() * 1e-3 *
            result.cwiseAbs().maxCoeff()) {
      break;
    }
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

DiscreteModel Zoh(const StateSpaceModel& model, double ts) {
  if (!(ts > 0.0) || !std::isfinite(ts)) {
    throw ValidationError("ts: sampling interval must be positive");
  }
  model.Validate();
  if (!AllFinite(model.a) || !AllFinite(model.b)) {
    throw ValidationError("zoh: non-finite model entries");
  }
  const int n = model.states();
  const int m = model.inputs();
  MatrixXd aug = MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = model.a * ts;
  aug.topRightCorner(n, m) = model.b * ts;
  const MatrixXd e = MatrixExponential(aug);

  DiscreteModel dm;
  dm.phi = e.topLeftCorner(n, n);
  dm.delta = e.topRightCorner(n, m);
  dm.c = model.c;
  dm.d = model.d;
  dm.ts = ts;
  dm.state_labels = model.state_labels;
  dm.input_labels = model.input_labels;
  dm.output_labels = model.output_labels;
  return dm;
}

VectorXd Rk4Step(const MatrixXd& a, const MatrixXd& b, const VectorXd& x,
                 const VectorXd& u, double dt) {
  const VectorXd bu = b * u;
  const VectorXd k1 = a * x + bu;
  const VectorXd k2 = a * (x + 0.5 * dt * k1) + bu;
  const VectorXd k3 = a * (x + 0.5 * dt * k2) + bu;
  const VectorXd k4 = a * (x + dt * k3) + bu;
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double CheckAgainstIntegration(const StateSpaceModel& model,
                               const DiscreteModel& discrete, double horizon,
                               const SampledInput& input, const VectorXd& x0,
                               bool relative) {
  const int n = model.states();
  if (discrete.states() != n || discrete.inputs() != model.inputs()) {
    throw ValidationError("check_against_integration: dimension mismatch");
  }
  const int steps = static_cast<int>(std::lround(horizon / discrete.ts));
  constexpr int kSubsteps = 100;
  const double dt = discrete.ts / kSubsteps;

  VectorXd xd = x0.size() == 0 ? VectorXd::Zero(n) : x0;
  VectorXd xf = xd;
  double worst = 0.0;
  for (int k = 0; k < steps; ++k) {
    const VectorXd u = input(k);
    xd = discrete.phi * xd + discrete.delta * u;
    for (int s = 0; s < kSubsteps; ++s) xf = Rk4Step(model.a, model.b, xf, u, dt);
    double dev = (xd - xf).cwiseAbs().maxCoeff();
    if (relative) dev /= std::max(1.0, xf.cwiseAbs().maxCoeff());
    worst = std::max(worst, dev);
  }
  return worst;
}

}  // namespace lfc
