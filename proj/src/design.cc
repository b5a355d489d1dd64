#include "lfc/design.h"

#include <algorithm>

#include "lfc/discretize.h"

namespace lfc {

std::string ToString(DesignMode mode) {
  return mode == DesignMode::kCentral ? "central" : "decentral";
}
std::string ToString(Method method) { return method == Method::kDp ? "dp" : "ep"; }
std::string ToString(WindowPolicy policy) {
  return policy == WindowPolicy::kMinimal ? "minimal" : "uniform";
}

DesignMode DesignModeFromString(const std::string& s) {
  if (s == "central") return DesignMode::kCentral;
  if (s == "decentral") return DesignMode::kDecentral;
  throw ValidationError("unknown mode '" + s + "' (central | decentral)");
}
Method MethodFromString(const std::string& s) {
  if (s == "dp") return Method::kDp;
  if (s == "ep") return Method::kEp;
  throw ValidationError("unknown method '" + s + "' (dp | ep)");
}
WindowPolicy WindowPolicyFromString(const std::string& s) {
  if (s == "minimal") return WindowPolicy::kMinimal;
  if (s == "uniform") return WindowPolicy::kUniform;
  throw ValidationError("unknown window policy '" + s + "' (minimal | uniform)");
}

namespace {

MatrixXd StateWeight(const DesignWeights& w, const MatrixXd& c_ace,
                     const std::vector<int>& integral_states, int n) {
  if (!(w.q_state > 0.0) && !(w.q_state == 0.0 && w.q_ace == 0.0)) {
    throw ValidationError("weights: q_state must be > 0");
  }
  if (w.q_ace < 0.0) throw ValidationError("weights: q_ace must be >= 0");
  MatrixXd q = w.q_state * MatrixXd::Identity(n, n);
  if (w.q_integral) {
    if (!(*w.q_integral > 0.0)) throw ValidationError("weights: q_integral must be > 0");
    for (int k : integral_states) q(k, k) = *w.q_integral;
  }
  q += w.q_ace * c_ace.transpose() * c_ace;
  return q;
}

template <typename T>
const T* Find(const std::map<std::string, T>& m, const std::string& key) {
  auto it = m.find(key);
  return it == m.end() ? nullptr : &it->second;
}

DesignProblem Finish(std::string label, int area, const DiscreteModel& dm,
                     const std::vector<int>& control_cols,
                     const std::vector<int>& design_rows, const MatrixXd& q_default,
                     int m, const DesignOptions& options) {
  const DesignPlant plant = MakeDesignPlant(dm, control_cols, design_rows);
  const int n = dm.states();
  const int p = static_cast<int>(design_rows.size());
  DesignProblem prob;
  prob.label = std::move(label);
  prob.area = area;
  if (options.policy == WindowPolicy::kMinimal) {
    prob.pred = BuildPrediction(plant, MinWindow(n, p), Reconstruction::kObservable);
  } else {
    if (options.uniform_n < 1) throw ValidationError("uniform_n must be >= 1");
    prob.pred = BuildPrediction(plant, options.uniform_n, Reconstruction::kLeastSquares);
  }
  const MatrixXd* q_over = Find(options.q_s_override, prob.label);
  const MatrixXd* h_over = Find(options.h_s_override, prob.label);
  const MatrixXd q_s = q_over ? *q_over : q_default;
  const MatrixXd h_s = h_over ? *h_over : options.weights.h * MatrixXd::Identity(m, m);
  prob.cost = TransformCost(prob.pred, q_s, h_s);
  return prob;
}

}  // namespace

std::vector<DesignProblem> BuildDesignProblems(const LfcSystem& system,
                                               DesignMode mode,
                                               const DesignOptions& options) {
  if (!(options.ts > 0.0)) throw ValidationError("ts must be > 0");
  const int areas = system.area_count();
  std::vector<DesignProblem> out;

  if (mode == DesignMode::kCentral) {
    const DiscreteModel dm = Zoh(system.model, options.ts);
    std::vector<int> rows, controls, integral_states;
    for (int i = 0; i < areas; ++i) rows.push_back(system.layout[i].ace_output);
    for (int i = 0; i < areas; ++i) {
      if (system.layout[i].integral_output >= 0) {
        rows.push_back(system.layout[i].integral_output);
        integral_states.push_back(system.layout[i].integral_state);
      }
      controls.push_back(system.layout[i].control_input);
    }
    MatrixXd c_ace(areas, system.model.states());
    for (int i = 0; i < areas; ++i) c_ace.row(i) = system.model.c.row(system.layout[i].ace_output);
    const MatrixXd q = StateWeight(options.weights, c_ace, integral_states,
                                   system.model.states());
    DesignProblem prob = Finish("central", -1, dm, controls, rows, q, areas, options);
    prob.measured_rows = rows;
    prob.control_columns = controls;
    out.push_back(std::move(prob));
    return out;
  }

  ExpansionMap map = DefaultExpansion(system);
  if (options.complementary) SetComplementaryMatrix(map, *options.complementary);
  const StateSpaceModel expanded = Expand(system.model, map);
  const std::vector<Subsystem> subs = ExtractSubsystems(system.model, expanded, map);
  for (const Subsystem& sub : subs) {
    const int i = sub.index;
    const int n = sub.model.states();
    const DiscreteModel dm = Zoh(sub.model, options.ts);
    std::vector<int> design_rows(sub.model.outputs());
    for (int r = 0; r < sub.model.outputs(); ++r) design_rows[r] = r;

    // Local position of this area's ∫ACE copy inside its own block.
    std::vector<int> integral_states;
    const int orig = system.layout[i].integral_state;
    if (orig >= 0) {
      const auto& block = map.expanded_blocks[i];
      for (int k = 0; k < static_cast<int>(block.size()); ++k) {
        if (map.t(block[k], orig) == 1.0) integral_states.push_back(k);
      }
    }
    // Row 0 of every subsystem output set is the area's ACE.
    const MatrixXd c_ace = sub.model.c.topRows(1);
    const MatrixXd q = StateWeight(options.weights, c_ace, integral_states, n);
    DesignProblem prob = Finish("area" + std::to_string(i + 1), i, dm,
                                {sub.control_input}, design_rows, q, 1, options);
    prob.measured_rows = map.sub_outputs[i];
    prob.control_columns = {system.layout[i].control_input};
    out.push_back(std::move(prob));
  }
  return out;
}

SynthesisOutput Synthesize(const DesignProblem& problem, int index,
                           Method method, const DpConfig& dp,
                           const EpConfig& ep) {
  SynthesisOutput out;
  out.label = problem.label;
  if (method == Method::kDp) {
    DpTrace trace;
    out.gain = SolveDp(problem.pred, problem.cost, dp, &trace);
    out.dp_trace = std::move(trace);
    out.cost = GainCost(problem.pred, problem.cost, out.gain.f,
                        GainCostOptions{ep.penalty, 1e-10});
  } else {
    EpConfig cfg = ep;
    cfg.rng_seed = ep.rng_seed + static_cast<std::uint64_t>(index);
    EpGainResult r = RunEp(problem.pred, problem.cost, cfg);
    out.gain = r.gain;
    out.cost = r.cost;
    out.ep_trace = std::move(r.trace);
    out.warning = std::move(r.warning);
  }
  return out;
}

ControllerSpec MakeController(const DesignProblem& problem, const GainMatrix& gain) {
  return {gain, problem.measured_rows, problem.control_columns};
}

}  // namespace lfc
