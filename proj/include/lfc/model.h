#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lfc/linalg.h"

namespace lfc {

enum class AreaKind { kReheatSteam, kNonreheatSteam, kHydro };

std::string ToString(AreaKind kind);
AreaKind AreaKindFromString(const std::string& name);

/// Internal state count contributed by one area (tie states excluded).
int InternalStateCount(AreaKind kind);

/// Physical constants of one generation area. Time constants in seconds,
/// kp and r in Hz/pu-MW, b in pu-MW/Hz. Fields unused by `kind` are
/// ignored.
struct AreaParams {
  AreaKind kind = AreaKind::kNonreheatSteam;
  double tp = 20.0;
  double kp = 120.0;
  double tg = 0.08;
  double tt = 0.3;
  double tr = 10.0;
  double kr = 0.5;
  double tw = 1.0;
  // Hydro transient-droop compensator (1 + s·t_reset)/(1 + s·t_comp).
  double t_reset = 5.0;
  double t_comp = 38.0;
  double r = 2.4;
  double b = 0.425;

  static AreaParams Defaults(AreaKind kind);
};

/// Synchronizing tie between two areas (1-based area indices). The tie
/// power flowing from `from` to `to` obeys dP/dt = t·(ΔF_from − ΔF_to).
struct TieParams {
  int from = 1;
  int to = 2;
  double t = 0.545;
};

/// Continuous (A, B, C, D) with labels on every row and column.
struct StateSpaceModel {
  MatrixXd a, b, c, d;
  std::vector<std::string> state_labels;
  std::vector<std::string> input_labels;
  std::vector<std::string> output_labels;

  int states() const { return static_cast<int>(a.rows()); }
  int inputs() const { return static_cast<int>(b.cols()); }
  int outputs() const { return static_cast<int>(c.rows()); }

  /// Throws ValidationError when dimensions or labels are inconsistent.
  void Validate() const;

  int StateIndex(const std::string& label) const;
  int InputIndex(const std::string& label) const;
  int OutputIndex(const std::string& label) const;
};

/// Per-area index bookkeeping for a built LFC system (all 0-based).
struct AreaLayout {
  int freq_state = -1;
  std::vector<int> internal_states;  // includes freq_state
  int integral_state = -1;           // -1 when integral augmentation is off
  int disturbance_input = -1;        // ΔPd column
  int control_input = -1;            // ΔPc column
  int ace_output = -1;
  int freq_output = -1;
  int integral_output = -1;
  std::vector<int> upstream_ties;    // tie states with to == this area
  std::vector<int> downstream_ties;  // tie states with from == this area
};

struct LfcSystem {
  StateSpaceModel model;
  std::vector<AreaParams> areas;
  std::vector<TieParams> ties;
  bool integral_augmentation = false;
  std::vector<AreaLayout> layout;
  std::vector<int> tie_states;  // state index per tie, in tie-list order
  /// Net tie export of each area as a row over the state vector.
  MatrixXd tie_injection;

  int area_count() const { return static_cast<int>(areas.size()); }
  /// Output rows each area's controller measures: ACE, plus ∫ACE when
  /// integral augmentation is on.
  std::vector<int> MeasuredOutputs(int area) const;
  /// Block of original state indices owned by `area` for overlapping
  /// decomposition: upstream ties, internal states, downstream ties.
  std::vector<int> Block(int area) const;
};

/// Per-area continuous blocks: `a` over the internal states (frequency
/// first), `disturbance` and `control` columns, and `tie_column`, the
/// derivative contribution per unit of net tie export.
struct AreaBlock {
  MatrixXd a;
  VectorXd disturbance;
  VectorXd control;
  VectorXd tie_column;
  std::vector<std::string> labels;
};

void ValidateAreaParams(const AreaParams& params);
AreaBlock BuildAreaBlock(const AreaParams& params);

/// Assembles the interconnected model. State order: for each area its
/// internal states, then (if enabled) its ∫ACE state, then the ties it
/// sends power through. Inputs are [ΔPd_i, ΔPc_i] per area; outputs are
/// all ACE_i, then all ΔF_i, then (if enabled) all ∫ACE_i.
LfcSystem BuildSystem(const std::vector<AreaParams>& areas,
                      const std::vector<TieParams>& ties,
                      bool integral_augmentation = false);

/// Four-area longitudinal chain: reheat, reheat, non-reheat, hydro.
std::vector<AreaParams> DefaultAreas();
std::vector<TieParams> DefaultChainTies(int area_count);
LfcSystem BuildDefaultSystem(bool integral_augmentation = false);

struct SteadyStateReport {
  bool singular = false;
  std::optional<VectorXd> equilibrium;
  /// Orthonormal basis of null(A), one column per direction; empty when A
  /// is nonsingular.
  MatrixXd null_space;
  int rank = 0;
};

/// Solves A·x = −B·u, or reports the null space of a singular A.
SteadyStateReport SteadyStateCheck(const StateSpaceModel& model,
                                   const VectorXd& input);

}  // namespace lfc
