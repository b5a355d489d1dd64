#pragma once

// Reference computations written independently of the library, used as
// oracles by the unit and acceptance tests.

#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Rank by Gaussian row reduction with partial pivoting.
int RowReductionRank(MatrixXd m, double tol = 1e-9);

/// ZOH of ẋ = a·x + b·u.
std::pair<double, double> ScalarZoh(double a, double b, double ts);

/// ZOH of the double integrator: Φ = [[1, ts], [0, 1]], Δ = [ts²/2, ts]ᵀ.
std::pair<MatrixXd, MatrixXd> DoubleIntegratorZoh(double ts);

/// Classical RK4 on ẋ = A·x + B·u(t), n_sub sub-steps per unit interval
/// of length `dt`; returns the states at every interval boundary.
std::vector<VectorXd> Rk4(const MatrixXd& a, const MatrixXd& b, const VectorXd& x0,
                          const std::function<VectorXd(double)>& u, double dt,
                          int intervals, int n_sub);

/// Steady-state gain of the infinite-horizon scalar problem
///   min Σ q·w² + r·w·u + s·u², w' = θ·w + ω·u
/// by value iteration; each Bellman step is minimized numerically with a
/// golden-section search, so no Riccati formula is involved. Returns the
/// feedback u = f·w.
double ScalarValueIterationGain(double theta, double omega, double q, double r,
                                double s, int iterations = 4000);

/// LQR for the next-state cost Σ x[k+1]ᵀQ x[k+1] + uᵀH u, x' = A x + B u,
/// by Riccati iteration on the equivalent cross-term problem. Returns K
/// with u = −K·x.
MatrixXd NextStateLqrGain(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                          const MatrixXd& h, int iterations = 20000);

/// Σ_k x[k+1]ᵀQ x[k+1] + u[k]ᵀH u[k] along a given trajectory.
double DirectCost(const std::vector<VectorXd>& x_next, const std::vector<VectorXd>& u,
                  const MatrixXd& q, const MatrixXd& h);

/// Survivor indices of a tournament in which every entry meets every other:
/// by wins (fitness ≤ opponent) desc, then fitness, then index.
std::vector<int> BruteForceTournament(const std::vector<double>& fitness, int keep);

/// Step response of the isolated non-reheat area with its droop loop
/// closed, simulated from the transfer function
///   ΔF/ΔPd = −kp(1+s·tg)(1+s·tt) / ((1+s·tp)(1+s·tg)(1+s·tt) + kp/r)
/// in controllable canonical form. Samples at multiples of `ts`.
std::vector<double> NonreheatStepResponse(double tp, double kp, double tg, double tt,
                                          double r, double step, double ts, int samples);

/// Random matrix with entries uniform in [−scale, scale].
MatrixXd Random(int rows, int cols, std::mt19937_64& rng, double scale = 1.0);

/// Random symmetric positive definite matrix with eigenvalues ≥ floor.
MatrixXd RandomSpd(int n, std::mt19937_64& rng, double floor = 0.1);

/// Random matrix scaled to spectral radius `rho`.
MatrixXd RandomStable(int n, std::mt19937_64& rng, double rho);

}  // namespace oracle
