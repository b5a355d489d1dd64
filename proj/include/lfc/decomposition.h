#pragma once

#include <vector>

#include "lfc/model.h"

namespace lfc {

/// Overlapping expansion x̃ = T·x. Expanded coordinates are the blocks laid
/// end to end; a state shared by two blocks is copied into both.
struct ExpansionMap {
  MatrixXd t;       // ñ×n, one unit entry per row
  MatrixXd t_star;  // (TᵀT)⁻¹Tᵀ
  MatrixXd m;       // ñ×ñ complementary matrix, zero unless supplied
  std::vector<std::vector<int>> blocks;           // original indices
  std::vector<std::vector<int>> expanded_blocks;  // expanded indices
  std::vector<std::vector<int>> sub_inputs;       // [ΔPd_i, ΔPc_i]
  std::vector<std::vector<int>> sub_outputs;      // measured rows

  int original_dim() const { return static_cast<int>(t.cols()); }
  int expanded_dim() const { return static_cast<int>(t.rows()); }
  std::vector<int> BlockSizes() const;
};

/// Builds T for contiguous blocks over 0..n−1. Adjacent blocks may share
/// states; non-adjacent blocks may not.
ExpansionMap ExpansionMatrix(int n, const std::vector<std::vector<int>>& blocks);

/// Per-area partition and input/output routing of an LFC system.
ExpansionMap DefaultExpansion(const LfcSystem& system);

/// Replaces M after checking the restriction condition M·T = 0.
void SetComplementaryMatrix(ExpansionMap& map, const MatrixXd& m);

/// Ã = T·A·T* + M, B̃ = T·B, C̃ = C·T*.
StateSpaceModel Expand(const StateSpaceModel& model, const ExpansionMap& map);

struct Subsystem {
  int index = 0;
  StateSpaceModel model;  // Ãᵢ, B̃ᵢ (inputs [ΔPd_i, ΔPc_i]), measured rows
  int disturbance_input = 0;
  int control_input = 1;
  std::vector<MatrixXd> a_coupling;  // Ãᵢⱼ, j ≠ i (Ãᵢᵢ slot left empty)
  std::vector<MatrixXd> b_coupling;  // B̃ᵢⱼ over area j's input columns
};

/// Decoupled subsystems. The output rows of subsystem i read the block-i
/// copies of the states they depend on; a measured row with support
/// outside its own block is a ValidationError.
std::vector<Subsystem> ExtractSubsystems(const StateSpaceModel& original,
                                         const StateSpaceModel& expanded,
                                         const ExpansionMap& map);

}  // namespace lfc
