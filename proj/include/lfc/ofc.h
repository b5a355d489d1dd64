#pragma once

#include <string>
#include <vector>

#include "lfc/discretize.h"

namespace lfc {

/// Layout of the measurement history
///   w[k] = [y[k]; y[k−1]; …; y[k−N+1] | u[k−1]; …; u[k−N+1]].
/// The current input u[k] is not part of w[k]: u[k] = f·w[k] is what the
/// controller computes.
struct MeasurementWindow {
  int n_window = 1;  // N
  int p = 1;         // outputs per sample
  int m = 1;         // controls per sample

  int z_size() const { return n_window * p; }
  int v_size() const { return (n_window - 1) * m; }
  int q() const { return z_size() + v_size(); }
};

/// N = ceil(n / p).
int MinWindow(int n, int p);

/// Discrete model restricted to the controller's view: Φ, the control
/// columns of Δ, and the measured output rows of C.
struct DesignPlant {
  MatrixXd phi;
  MatrixXd delta;
  MatrixXd c;
};

/// Picks control columns and measured rows out of a discretized model.
DesignPlant MakeDesignPlant(const DiscreteModel& model,
                            const std::vector<int>& control_columns,
                            const std::vector<int>& measured_rows);

enum class Reconstruction {
  kExact,       // rank(O) must equal n
  kObservable,  // rank(O) must equal the observable dimension of (Φ, C);
                // the unobservable component is dropped (minimum norm)
  kLeastSquares // any rank; minimum-norm least squares
};

/// History-space predictor:
///   x[k+1] = f5·w[k] + f4·u[k]
///   y[k+1] = alpha·z[k] + beta·[u[k]; u[k−1]; …; u[k−N+1]]
///   w[k+1] = theta·w[k] + omega·u[k]
struct PredictionForm {
  MeasurementWindow window;
  MatrixXd f5, f4;
  MatrixXd alpha, beta;
  MatrixXd theta, omega;
  /// Maps w[k] to the reconstructed x[k].
  MatrixXd state_map;
  int observability_rank = 0;   // rank of the window stack O
  int observable_dimension = 0; // rank of the n-step observability matrix
  bool exact = true;            // rank(O) == n
};

/// Throws NumericError("window-unobservable …") when the stacked window
/// observability matrix has rank below n (kExact) or below the observable
/// dimension (kObservable). With kObservable the output prediction stays
/// exact; the state prediction is exact modulo the unobservable subspace.
PredictionForm BuildPrediction(const DesignPlant& plant, int n_window,
                               Reconstruction mode = Reconstruction::kExact);

/// State-space LQ weights carried into history space:
///   x[k+1]ᵀQs·x[k+1] + uᵀHs·u = wᵀ·q_w·w + uᵀ·r_cross·w + uᵀ·s_u·u.
struct TransformedCost {
  MatrixXd q_w;      // F5ᵀ Qs F5
  MatrixXd r_cross;  // 2 F4ᵀ Qs F5
  MatrixXd s_u;      // F4ᵀ Qs F4 + Hs
  MatrixXd q_s, h_s;
};

TransformedCost TransformCost(const PredictionForm& pred, const MatrixXd& q_s,
                              const MatrixXd& h_s);

enum class Provenance { kDp, kEp };
std::string ToString(Provenance p);
Provenance ProvenanceFromString(const std::string& s);

/// Output-feedback gain for the u = f·w convention.
struct GainMatrix {
  MatrixXd f;
  Provenance provenance = Provenance::kDp;
  MeasurementWindow window;
  double spectral_radius = 0.0;
};

/// A_cl = theta + omega·f.
MatrixXd ClosedLoop(const PredictionForm& pred, const MatrixXd& f);

struct GainCostOptions {
  double penalty = 1e12;  // J_max
  double lyapunov_tolerance = 1e-10;
};

/// Infinite-horizon cost of u = f·w averaged over the canonical basis of
/// w-space, i.e. trace(P)/q with P = G + A_clᵀ·P·A_cl. Unstable gains map
/// to penalty·(1 + ρ).
double GainCost(const PredictionForm& pred, const TransformedCost& cost,
                const MatrixXd& f, const GainCostOptions& options = {});

/// Same as GainCost but for an explicit set of initial histories (columns
/// of `w0_set`).
double GainCost(const PredictionForm& pred, const TransformedCost& cost,
                const MatrixXd& f, const MatrixXd& w0_set,
                const GainCostOptions& options);

/// G = q_w + fᵀ·r_cross + fᵀ·s_u·f, symmetrized.
MatrixXd StageWeight(const TransformedCost& cost, const MatrixXd& f);

}  // namespace lfc
