#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lfc/model.h"
#include "lfc/ofc.h"

namespace lfc {

/// Piecewise-linear signal through (t, value) knots sorted by t; constant
/// outside the knot range. Steps are two knots at the same t (the later
/// knot wins at that instant).
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  explicit PiecewiseLinear(std::vector<std::pair<double, double>> knots);
  static PiecewiseLinear Step(double at, double level);

  double operator()(double t) const;
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

 private:
  std::vector<std::pair<double, double>> knots_;
};

struct ParameterScaling {
  double tp = 1.0;
  double r = 1.0;
  double b = 1.0;
  double tie = 1.0;
};

struct Scenario {
  std::string label;
  double duration = 40.0;
  double ts = 0.1;
  std::vector<PiecewiseLinear> disturbance;  // ΔPd_i(t), one per area
  ParameterScaling scaling;
};

struct ScenarioOptions {
  double duration = 40.0;
  double ts = 0.1;
  double step_time = 1.0;
  double step_size = 0.01;
  double param_factor = 1.5;
  double ramp_start = 1.0;
  double ramp_end = 6.0;
  double step_back_time = 20.0;
};

/// test1: +step in every area at step_time, nominal plant.
/// test2: same disturbance on a plant scaled by param_factor on {tp, r, b, t_ij}.
/// test3: ramp 0 → step_size over [ramp_start, ramp_end], hold, step back to
///        zero at step_back_time, nominal plant.
Scenario MakeScenario(int test, int area_count, const ScenarioOptions& opt = {});
std::vector<Scenario> ScenarioLibrary(int area_count,
                                      const ScenarioOptions& opt = {});

/// Copies of the parameters with tp_i, r_i, b_i and t_ij scaled.
std::pair<std::vector<AreaParams>, std::vector<TieParams>> ApplyParamVariation(
    const std::vector<AreaParams>& areas, const std::vector<TieParams>& ties,
    const ParameterScaling& scaling);

/// One output-feedback controller wired into the plant.
struct ControllerSpec {
  GainMatrix gain;
  std::vector<int> measured_rows;    // plant output rows, in window order
  std::vector<int> control_columns;  // plant input columns
};

struct SignalMetrics {
  double peak = 0.0;                    // max |x|
  std::optional<double> settling_time;  // none when the tail leaves the band
  double residual = 0.0;                // mean over the last 10% of samples
};

/// Settling: first sample from which |x − residual| ≤ band for the rest of
/// the series.
SignalMetrics ComputeMetrics(const VectorXd& time, const VectorXd& series,
                             double band);

struct SimResult {
  VectorXd time;
  MatrixXd freq;  // samples × areas
  MatrixXd ace;
  MatrixXd tie;
  MatrixXd control;
  MatrixXd states;   // samples × n
  double spectral_radius = 0.0;
  bool stable = false;
};

/// Closed-loop map of plant + controller history registers:
///   X[k+1] = a·X[k] + b·d[k],  X = [x; h_1; …; h_c],
/// where h_i = [y_i[k−1]; …; y_i[k−N+1]; u_i[k−1]; …; u_i[k−N+1]] and d are
/// the plant's disturbance inputs.
struct AugmentedLoop {
  MatrixXd a;
  MatrixXd b;
  int plant_states = 0;
};

AugmentedLoop BuildAugmentedLoop(const LfcSystem& plant_system,
                                 const DiscreteModel& plant,
                                 const std::vector<ControllerSpec>& controllers);

/// Step-by-step engine: each controller appends its measurements to its
/// history buffers and applies u = f·w; the plant is the full coupled model.
SimResult SimulateClosedLoop(const LfcSystem& plant_system,
                             const DiscreteModel& plant,
                             const std::vector<ControllerSpec>& controllers,
                             const Scenario& scenario);

/// Same trajectories computed by iterating the augmented loop matrix.
SimResult SimulateAugmented(const LfcSystem& plant_system,
                            const DiscreteModel& plant,
                            const std::vector<ControllerSpec>& controllers,
                            const Scenario& scenario);

struct MetricsRow {
  std::string signal;
  SignalMetrics metrics;
};

/// Per-signal metrics for dF, ACE, dPtie and u with band = fraction·peak.
std::vector<MetricsRow> ResultMetrics(const SimResult& result,
                                      double band_fraction = 0.02);

}  // namespace lfc
