#include "lfc/ofc.h"

#include <cmath>

#include <Eigen/QR>

namespace lfc {

int MinWindow(int n, int p) {
  if (n < 1 || p < 1) throw ValidationError("MinWindow: n, p must be >= 1");
  return (n + p - 1) / p;
}

DesignPlant MakeDesignPlant(const DiscreteModel& model,
                            const std::vector<int>& control_columns,
                            const std::vector<int>& measured_rows) {
  for (int c : control_columns) {
    if (c < 0 || c >= model.inputs()) {
      throw ValidationError("design plant: control column out of range");
    }
  }
  for (int r : measured_rows) {
    if (r < 0 || r >= model.outputs()) {
      throw ValidationError("design plant: measured row out of range");
    }
  }
  DesignPlant plant;
  plant.phi = model.phi;
  plant.delta = model.delta(Eigen::all, control_columns);
  plant.c = model.c(measured_rows, Eigen::all);
  return plant;
}

PredictionForm BuildPrediction(const DesignPlant& plant, int n_window,
                               Reconstruction mode) {
  const int n = static_cast<int>(plant.phi.rows());
  const int m = static_cast<int>(plant.delta.cols());
  const int p = static_cast<int>(plant.c.rows());
  if (plant.phi.cols() != n || plant.delta.rows() != n || plant.c.cols() != n) {
    throw ValidationError("build_prediction: inconsistent plant dimensions");
  }
  if (n_window < 1) throw ValidationError("build_prediction: N must be >= 1");
  if (m < 1 || p < 1) {
    throw ValidationError("build_prediction: need at least one input and output");
  }

  const int big_n = n_window;
  PredictionForm pred;
  pred.window = {big_n, p, m};
  const int nz = pred.window.z_size();
  const int nv = pred.window.v_size();
  const int q = pred.window.q();

  std::vector<MatrixXd> phi_pow(big_n + 1);
  phi_pow[0] = MatrixXd::Identity(n, n);
  for (int i = 1; i <= big_n; ++i) phi_pow[i] = plant.phi * phi_pow[i - 1];

  // z block r holds y[k−r]; v block s holds u[k−1−s]. In terms of the
  // oldest state x0 = x[k−N+1]:
  //   y[k−r] = C Φ^{N−1−r} x0 + Σ_{s≥r} C Φ^{s−r} Δ u[k−1−s]
  //   x[k]   = Φ^{N−1} x0 + Σ_s Φ^s Δ u[k−1−s]
  MatrixXd obs(nz, n);
  MatrixXd gamma = MatrixXd::Zero(nz, nv);
  MatrixXd psi(n, nv);
  for (int r = 0; r < big_n; ++r) {
    obs.middleRows(r * p, p) = plant.c * phi_pow[big_n - 1 - r];
    for (int s = r; s < big_n - 1; ++s) {
      gamma.block(r * p, s * m, p, m) = plant.c * phi_pow[s - r] * plant.delta;
    }
  }
  for (int s = 0; s < big_n - 1; ++s) {
    psi.middleCols(s * m, m) = phi_pow[s] * plant.delta;
  }

  pred.observability_rank = NumericalRank(obs, 1e-11);
  pred.exact = pred.observability_rank == n;
  {
    MatrixXd full(n * p, n);
    MatrixXd row_block = plant.c;
    for (int i = 0; i < n; ++i) {
      full.middleRows(i * p, p) = row_block;
      row_block = row_block * plant.phi;
    }
    pred.observable_dimension = NumericalRank(full, 1e-11);
  }
  const int required = mode == Reconstruction::kExact        ? n
                       : mode == Reconstruction::kObservable ? pred.observable_dimension
                                                             : 0;
  if (pred.observability_rank < required) {
    throw NumericError("window-unobservable: rank(O) = " +
                       std::to_string(pred.observability_rank) + " < " +
                       std::to_string(required) + " (n = " + std::to_string(n) +
                       ") with N = " + std::to_string(big_n));
  }

  MatrixXd obs_pinv;
  if (nz == n && pred.exact) {
    obs_pinv = obs.fullPivLu().inverse();
  } else {
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(obs);
    cod.setThreshold(1e-11);
    obs_pinv = cod.pseudoInverse();
  }

  const MatrixXd lead = phi_pow[big_n - 1] * obs_pinv;
  pred.state_map = MatrixXd(n, q);
  pred.state_map.leftCols(nz) = lead;
  if (nv > 0) pred.state_map.rightCols(nv) = psi - lead * gamma;

  pred.f5 = plant.phi * pred.state_map;
  pred.f4 = plant.delta;

  const MatrixXd cf5 = plant.c * pred.f5;
  const MatrixXd cf4 = plant.c * pred.f4;
  pred.alpha = cf5.leftCols(nz);
  pred.beta = MatrixXd(p, nv + m);
  pred.beta.leftCols(m) = cf4;
  if (nv > 0) pred.beta.rightCols(nv) = cf5.rightCols(nv);

  pred.theta = MatrixXd::Zero(q, q);
  pred.omega = MatrixXd::Zero(q, m);
  pred.theta.topRows(p) = cf5;
  pred.omega.topRows(p) = cf4;
  for (int r = 1; r < big_n; ++r) {
    pred.theta.block(r * p, (r - 1) * p, p, p).setIdentity();
  }
  if (nv > 0) {
    pred.omega.block(nz, 0, m, m).setIdentity();
    for (int s = 1; s < big_n - 1; ++s) {
      pred.theta.block(nz + s * m, nz + (s - 1) * m, m, m).setIdentity();
    }
  }
  return pred;
}

TransformedCost TransformCost(const PredictionForm& pred, const MatrixXd& q_s,
                              const MatrixXd& h_s) {
  const auto n = pred.f5.rows();
  const auto m = pred.f4.cols();
  if (q_s.rows() != n || q_s.cols() != n) {
    throw ValidationError("transform_cost: Qs must be n×n");
  }
  if (h_s.rows() != m || h_s.cols() != m) {
    throw ValidationError("transform_cost: Hs must be m×m");
  }
  // Qs = 0 is admitted as the degenerate no-state-penalty case.
  if (MaxAbs(q_s) != 0.0 && !IsSymmetricPositiveDefinite(q_s)) {
    throw ValidationError("transform_cost: Qs must be symmetric positive definite");
  }
  if (!IsSymmetricPositiveDefinite(h_s)) {
    throw ValidationError("transform_cost: Hs must be symmetric positive definite");
  }
  TransformedCost cost;
  cost.q_s = q_s;
  cost.h_s = h_s;
  cost.q_w = Symmetrize(pred.f5.transpose() * q_s * pred.f5);
  cost.r_cross = 2.0 * pred.f4.transpose() * q_s * pred.f5;
  cost.s_u = Symmetrize(pred.f4.transpose() * q_s * pred.f4 + h_s);
  return cost;
}

std::string ToString(Provenance p) { return p == Provenance::kDp ? "DP" : "EP"; }

Provenance ProvenanceFromString(const std::string& s) {
  if (s == "DP") return Provenance::kDp;
  if (s == "EP") return Provenance::kEp;
  throw ValidationError("unknown provenance '" + s + "'");
}

MatrixXd ClosedLoop(const PredictionForm& pred, const MatrixXd& f) {
  if (f.rows() != pred.omega.cols() || f.cols() != pred.theta.cols()) {
    throw ValidationError("closed_loop: gain is " + std::to_string(f.rows()) +
                          "x" + std::to_string(f.cols()) + ", expected " +
                          std::to_string(pred.omega.cols()) + "x" +
                          std::to_string(pred.theta.cols()));
  }
  return pred.theta + pred.omega * f;
}

MatrixXd StageWeight(const TransformedCost& cost, const MatrixXd& f) {
  return Symmetrize(cost.q_w + f.transpose() * cost.r_cross +
                    f.transpose() * cost.s_u * f);
}

double GainCost(const PredictionForm& pred, const TransformedCost& cost,
                const MatrixXd& f, const MatrixXd& w0_set,
                const GainCostOptions& options) {
  const MatrixXd a_cl = ClosedLoop(pred, f);
  double rho;
  try {
    rho = SpectralRadius(a_cl);
  } catch (const EigenNotConvergedError& e) {
    rho = e.bound();
  }
  if (!(rho < 1.0)) return options.penalty * (1.0 + rho);

  const MatrixXd g = StageWeight(cost, f);
  MatrixXd p;
  try {
    p = DiscreteLyapunovSum(a_cl, g, options.lyapunov_tolerance);
  } catch (const NumericError&) {
    return options.penalty * (1.0 + rho);
  }
  double total = 0.0;
  for (Eigen::Index j = 0; j < w0_set.cols(); ++j) {
    total += w0_set.col(j).dot(p * w0_set.col(j));
  }
  return total / static_cast<double>(w0_set.cols());
}

double GainCost(const PredictionForm& pred, const TransformedCost& cost,
                const MatrixXd& f, const GainCostOptions& options) {
  const auto q = pred.theta.rows();
  return GainCost(pred, cost, f, MatrixXd::Identity(q, q), options);
}

}  // namespace lfc
