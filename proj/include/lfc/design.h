#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lfc/decomposition.h"
#include "lfc/dp.h"
#include "lfc/ep.h"
#include "lfc/sim.h"

namespace lfc {

enum class DesignMode { kCentral, kDecentral };
enum class Method { kDp, kEp };
enum class WindowPolicy { kMinimal, kUniform };

std::string ToString(DesignMode mode);
std::string ToString(Method method);
std::string ToString(WindowPolicy policy);
DesignMode DesignModeFromString(const std::string& s);
Method MethodFromString(const std::string& s);
WindowPolicy WindowPolicyFromString(const std::string& s);

/// Qs = q_state·I + q_ace·Σ cᵀc over the design's ACE rows, with the ∫ACE
/// diagonal entries set to q_integral when given; Hs = h·I.
struct DesignWeights {
  double q_state = 1.0;
  double q_ace = 0.0;
  std::optional<double> q_integral;
  double h = 1.0;
};

struct DesignOptions {
  double ts = 0.1;
  WindowPolicy policy = WindowPolicy::kMinimal;
  int uniform_n = 5;
  DesignWeights weights;
  /// Full weight matrices keyed by design label ("central", "area1", …);
  /// they replace the scalar construction for that design.
  std::map<std::string, MatrixXd> q_s_override;
  std::map<std::string, MatrixXd> h_s_override;
  /// Complementary matrix for the expansion (checked against M·T = 0).
  std::optional<MatrixXd> complementary;
};

/// One history-space LQ problem plus the wiring of its controller.
struct DesignProblem {
  std::string label;
  int area = -1;  // 0-based area for decentral designs, −1 for central
  PredictionForm pred;
  TransformedCost cost;
  std::vector<int> measured_rows;    // full-plant output rows
  std::vector<int> control_columns;  // full-plant input columns
};

/// Decentral: one problem per area on its decoupled subsystem. Central: a
/// single problem on the full model reading every area's measurements.
/// N is ceil(n/p) under kMinimal (observable-part reconstruction) and
/// uniform_n under kUniform (least-squares reconstruction).
std::vector<DesignProblem> BuildDesignProblems(const LfcSystem& system,
                                               DesignMode mode,
                                               const DesignOptions& options);

struct SynthesisOutput {
  std::string label;
  GainMatrix gain;
  double cost = 0.0;
  std::optional<DpTrace> dp_trace;
  std::vector<EpGeneration> ep_trace;
  std::optional<std::string> warning;
};

/// EP runs use seed + problem index so that area 1 reproduces the bare
/// seed.
SynthesisOutput Synthesize(const DesignProblem& problem, int index,
                           Method method, const DpConfig& dp,
                           const EpConfig& ep);

ControllerSpec MakeController(const DesignProblem& problem,
                              const GainMatrix& gain);

}  // namespace lfc
