#include "lfc/decomposition.h"

#include <algorithm>
#include <string>

namespace lfc {

std::vector<int> ExpansionMap::BlockSizes() const {
  std::vector<int> sizes;
  for (const auto& b : blocks) sizes.push_back(static_cast<int>(b.size()));
  return sizes;
}

ExpansionMap ExpansionMatrix(int n,
                             const std::vector<std::vector<int>>& blocks) {
  if (n < 1) throw ValidationError("expansion: n must be positive");
  if (blocks.empty()) throw ValidationError("expansion: no blocks");

  std::vector<std::vector<int>> owners(n);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    if (blk.empty()) throw ValidationError("expansion: empty block");
    for (std::size_t k = 0; k < blk.size(); ++k) {
      if (blk[k] < 0 || blk[k] >= n) {
        throw ValidationError("expansion: state index out of range");
      }
      if (k > 0 && blk[k] != blk[k - 1] + 1) {
        throw ValidationError("expansion: block " + std::to_string(b + 1) +
                              " is not contiguous");
      }
      owners[blk[k]].push_back(static_cast<int>(b));
    }
  }
  for (int s = 0; s < n; ++s) {
    if (owners[s].empty()) {
      throw ValidationError("expansion: state " + std::to_string(s + 1) +
                            " not covered by any block");
    }
    if (owners[s].size() > 2) {
      throw ValidationError("expansion: state " + std::to_string(s + 1) +
                            " shared by more than two blocks");
    }
    if (owners[s].size() == 2 && owners[s][1] - owners[s][0] != 1) {
      throw ValidationError("expansion: state " + std::to_string(s + 1) +
                            " overlaps non-adjacent blocks");
    }
  }

  ExpansionMap map;
  map.blocks = blocks;
  int nt = 0;
  for (const auto& blk : blocks) nt += static_cast<int>(blk.size());
  map.t = MatrixXd::Zero(nt, n);
  int row = 0;
  for (const auto& blk : blocks) {
    std::vector<int> expanded;
    for (int s : blk) {
      map.t(row, s) = 1.0;
      expanded.push_back(row++);
    }
    map.expanded_blocks.push_back(std::move(expanded));
  }
  // TᵀT is diagonal with the copy count of each state.
  const VectorXd copies = map.t.colwise().sum().transpose();
  map.t_star = copies.cwiseInverse().asDiagonal() * map.t.transpose();
  map.m = MatrixXd::Zero(nt, nt);
  return map;
}

ExpansionMap DefaultExpansion(const LfcSystem& system) {
  std::vector<std::vector<int>> blocks;
  for (int i = 0; i < system.area_count(); ++i) {
    blocks.push_back(system.Block(i));
  }
  ExpansionMap map = ExpansionMatrix(system.model.states(), blocks);
  for (int i = 0; i < system.area_count(); ++i) {
    const AreaLayout& l = system.layout[i];
    map.sub_inputs.push_back({l.disturbance_input, l.control_input});
    map.sub_outputs.push_back(system.MeasuredOutputs(i));
  }
  return map;
}

namespace {

void CheckRestriction(const MatrixXd& m, const MatrixXd& t) {
  if (m.rows() != t.rows() || m.cols() != t.rows()) {
    throw ValidationError("expansion: M must be ñ×ñ");
  }
  const MatrixXd mt = m * t;
  for (Eigen::Index c = 0; c < mt.cols(); ++c) {
    if (mt.col(c).cwiseAbs().maxCoeff() > 1e-12) {
      throw ValidationError("expansion: M·T != 0 at column " +
                            std::to_string(c + 1));
    }
  }
}

}  // namespace

void SetComplementaryMatrix(ExpansionMap& map, const MatrixXd& m) {
  CheckRestriction(m, map.t);
  map.m = m;
}

StateSpaceModel Expand(const StateSpaceModel& model, const ExpansionMap& map) {
  model.Validate();
  if (map.original_dim() != model.states()) {
    throw ValidationError("expand: map dimension does not match model");
  }
  CheckRestriction(map.m, map.t);

  StateSpaceModel out;
  out.a = map.t * model.a * map.t_star + map.m;
  out.b = map.t * model.b;
  out.c = model.c * map.t_star;
  out.d = model.d;
  out.input_labels = model.input_labels;
  out.output_labels = model.output_labels;
  for (std::size_t b = 0; b < map.blocks.size(); ++b) {
    for (int s : map.blocks[b]) {
      out.state_labels.push_back(model.state_labels[s] + "@" +
                                 std::to_string(b + 1));
    }
  }
  out.Validate();
  return out;
}

std::vector<Subsystem> ExtractSubsystems(const StateSpaceModel& original,
                                         const StateSpaceModel& expanded,
                                         const ExpansionMap& map) {
  const std::size_t nb = map.blocks.size();
  if (map.sub_inputs.size() != nb || map.sub_outputs.size() != nb) {
    throw ValidationError("extract: map lacks per-subsystem routing");
  }
  std::vector<Subsystem> subs;
  for (std::size_t i = 0; i < nb; ++i) {
    const auto& rows = map.expanded_blocks[i];
    const auto& block = map.blocks[i];
    const int ni = static_cast<int>(rows.size());
    Subsystem sub;
    sub.index = static_cast<int>(i);

    StateSpaceModel& sm = sub.model;
    sm.a = expanded.a(rows, rows);
    sm.b = expanded.b(rows, map.sub_inputs[i]);
    sm.c = MatrixXd::Zero(map.sub_outputs[i].size(), ni);
    sm.d = MatrixXd::Zero(map.sub_outputs[i].size(), map.sub_inputs[i].size());
    for (std::size_t r = 0; r < map.sub_outputs[i].size(); ++r) {
      const int out_row = map.sub_outputs[i][r];
      Eigen::RowVectorXd full = original.c.row(out_row);
      for (int k = 0; k < ni; ++k) {
        sm.c(r, k) = full(block[k]);
        full(block[k]) = 0.0;
      }
      if (full.cwiseAbs().maxCoeff() > 0.0) {
        throw ValidationError("extract: output '" +
                              original.output_labels[out_row] +
                              "' depends on states outside block " +
                              std::to_string(i + 1));
      }
      sm.output_labels.push_back(original.output_labels[out_row]);
    }
    for (int r : rows) sm.state_labels.push_back(expanded.state_labels[r]);
    for (int c : map.sub_inputs[i]) {
      sm.input_labels.push_back(expanded.input_labels[c]);
    }
    sm.Validate();

    sub.a_coupling.resize(nb);
    sub.b_coupling.resize(nb);
    for (std::size_t j = 0; j < nb; ++j) {
      if (j == i) continue;
      sub.a_coupling[j] = expanded.a(rows, map.expanded_blocks[j]);
      sub.b_coupling[j] = expanded.b(rows, map.sub_inputs[j]);
    }
    subs.push_back(std::move(sub));
  }
  return subs;
}

}  // namespace lfc
