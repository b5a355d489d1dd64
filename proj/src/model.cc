#include "lfc/model.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include <Eigen/SVD>

namespace lfc {

std::string ToString(AreaKind kind) {
  switch (kind) {
    case AreaKind::kReheatSteam:
      return "reheat-steam";
    case AreaKind::kNonreheatSteam:
      return "nonreheat-steam";
    case AreaKind::kHydro:
      return "hydro";
  }
  return "unknown";
}

AreaKind AreaKindFromString(const std::string& name) {
  if (name == "reheat-steam") return AreaKind::kReheatSteam;
  if (name == "nonreheat-steam") return AreaKind::kNonreheatSteam;
  if (name == "hydro") return AreaKind::kHydro;
  throw ValidationError("kind: unknown area kind '" + name + "'");
}

int InternalStateCount(AreaKind kind) {
  return kind == AreaKind::kNonreheatSteam ? 3 : 4;
}

AreaParams AreaParams::Defaults(AreaKind kind) {
  AreaParams p;
  p.kind = kind;
  return p;
}

namespace {

void RequirePositive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(std::string(field) +
                          ": must be a finite positive number");
  }
}

}  // namespace

void ValidateAreaParams(const AreaParams& p) {
  RequirePositive(p.tp, "tp");
  RequirePositive(p.kp, "kp");
  RequirePositive(p.tg, "tg");
  RequirePositive(p.r, "r");
  RequirePositive(p.b, "b");
  switch (p.kind) {
    case AreaKind::kReheatSteam:
      RequirePositive(p.tt, "tt");
      RequirePositive(p.tr, "tr");
      if (!(p.kr >= 0.0 && p.kr <= 1.0)) {
        throw ValidationError("kr: reheat fraction must lie in [0, 1]");
      }
      break;
    case AreaKind::kNonreheatSteam:
      RequirePositive(p.tt, "tt");
      break;
    case AreaKind::kHydro:
      RequirePositive(p.tw, "tw");
      RequirePositive(p.t_reset, "t_reset");
      RequirePositive(p.t_comp, "t_comp");
      break;
  }
}

AreaBlock BuildAreaBlock(const AreaParams& p) {
  ValidateAreaParams(p);
  const int n = InternalStateCount(p.kind);
  AreaBlock blk;
  blk.a = MatrixXd::Zero(n, n);
  blk.disturbance = VectorXd::Zero(n);
  blk.control = VectorXd::Zero(n);
  blk.tie_column = VectorXd::Zero(n);

  // Generator/load: ΔF' = (−ΔF + kp·(ΔPg − ΔPd − ΔPtie)) / tp.
  const double gen = p.kp / p.tp;
  blk.a(0, 0) = -1.0 / p.tp;
  blk.disturbance(0) = -gen;
  blk.tie_column(0) = -gen;

  switch (p.kind) {
    case AreaKind::kNonreheatSteam: {
      // [ΔF, ΔPt, ΔXg]
      blk.labels = {"dF", "dPt", "dXg"};
      blk.a(0, 1) = gen;
      blk.a(1, 1) = -1.0 / p.tt;
      blk.a(1, 2) = 1.0 / p.tt;
      blk.a(2, 0) = -1.0 / (p.r * p.tg);
      blk.a(2, 2) = -1.0 / p.tg;
      blk.control(2) = 1.0 / p.tg;
      break;
    }
    case AreaKind::kReheatSteam: {
      // [ΔF, ΔPt, ΔPr, ΔXg]; reheater output (1 + s·kr·tr)/(1 + s·tr)·ΔPt
      // drives the generator.
      blk.labels = {"dF", "dPt", "dPr", "dXg"};
      blk.a(0, 2) = gen;
      blk.a(1, 1) = -1.0 / p.tt;
      blk.a(1, 3) = 1.0 / p.tt;
      blk.a(2, 1) = 1.0 / p.tr - p.kr / p.tt;
      blk.a(2, 2) = -1.0 / p.tr;
      blk.a(2, 3) = p.kr / p.tt;
      blk.a(3, 0) = -1.0 / (p.r * p.tg);
      blk.a(3, 3) = -1.0 / p.tg;
      blk.control(3) = 1.0 / p.tg;
      break;
    }
    case AreaKind::kHydro: {
      // [ΔF, ΔPh, ΔXg, ΔXc]: servo 1/(1 + s·tg), compensator
      // (1 + s·t_reset)/(1 + s·t_comp), penstock (1 − s·tw)/(1 + 0.5·s·tw).
      blk.labels = {"dF", "dPh", "dXg", "dXc"};
      const Eigen::RowVectorXd servo_row = [&] {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
        row(0) = -1.0 / (p.r * p.tg);
        row(2) = -1.0 / p.tg;
        return row;
      }();
      const double servo_in = 1.0 / p.tg;
      blk.a.row(2) = servo_row;
      blk.control(2) = servo_in;

      const double ratio = p.t_reset / p.t_comp;
      Eigen::RowVectorXd comp_row = ratio * servo_row;
      comp_row(2) += 1.0 / p.t_comp;
      comp_row(3) += -1.0 / p.t_comp;
      blk.a.row(3) = comp_row;
      blk.control(3) = ratio * servo_in;

      Eigen::RowVectorXd turb_row = -2.0 * comp_row;
      turb_row(1) += -2.0 / p.tw;
      turb_row(3) += 2.0 / p.tw;
      blk.a.row(1) = turb_row;
      blk.control(1) = -2.0 * ratio * servo_in;

      blk.a(0, 1) = gen;
      break;
    }
  }
  return blk;
}

void StateSpaceModel::Validate() const {
  const auto n = a.rows();
  if (a.cols() != n) throw ValidationError("model: A must be square");
  if (b.rows() != n) throw ValidationError("model: B row count != n");
  if (c.cols() != n) throw ValidationError("model: C column count != n");
  if (d.rows() != c.rows() || d.cols() != b.cols()) {
    throw ValidationError("model: D must be outputs x inputs");
  }
  auto check_labels = [](const std::vector<std::string>& labels,
                         Eigen::Index count, const char* what) {
    if (static_cast<Eigen::Index>(labels.size()) != count) {
      throw ValidationError(std::string("model: ") + what +
                            " label count mismatch");
    }
    std::set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() != labels.size()) {
      throw ValidationError(std::string("model: duplicate ") + what +
                            " label");
    }
  };
  check_labels(state_labels, n, "state");
  check_labels(input_labels, b.cols(), "input");
  check_labels(output_labels, c.rows(), "output");
}

namespace {

int FindLabel(const std::vector<std::string>& labels,
              const std::string& label, const char* what) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw ValidationError(std::string("unknown ") + what + " label '" +
                          label + "'");
  }
  return static_cast<int>(it - labels.begin());
}

}  // namespace

int StateSpaceModel::StateIndex(const std::string& label) const {
  return FindLabel(state_labels, label, "state");
}
int StateSpaceModel::InputIndex(const std::string& label) const {
  return FindLabel(input_labels, label, "input");
}
int StateSpaceModel::OutputIndex(const std::string& label) const {
  return FindLabel(output_labels, label, "output");
}

std::vector<int> LfcSystem::MeasuredOutputs(int area) const {
  const AreaLayout& l = layout.at(area);
  std::vector<int> rows{l.ace_output};
  if (l.integral_output >= 0) rows.push_back(l.integral_output);
  return rows;
}

std::vector<int> LfcSystem::Block(int area) const {
  const AreaLayout& l = layout.at(area);
  std::vector<int> block = l.upstream_ties;
  block.insert(block.end(), l.internal_states.begin(),
               l.internal_states.end());
  if (l.integral_state >= 0) block.push_back(l.integral_state);
  block.insert(block.end(), l.downstream_ties.begin(),
               l.downstream_ties.end());
  std::sort(block.begin(), block.end());
  return block;
}

LfcSystem BuildSystem(const std::vector<AreaParams>& areas,
                      const std::vector<TieParams>& ties,
                      bool integral_augmentation) {
  if (areas.empty()) throw ValidationError("areas: at least one area required");
  const int na = static_cast<int>(areas.size());

  std::set<std::pair<int, int>> seen;
  for (const TieParams& tie : ties) {
    if (tie.from < 1 || tie.from > na || tie.to < 1 || tie.to > na) {
      throw ValidationError("ties: area index out of range");
    }
    if (tie.from == tie.to) throw ValidationError("ties: self-tie");
    const auto key = std::minmax(tie.from, tie.to);
    if (!seen.insert(key).second) throw ValidationError("ties: duplicate tie");
    RequirePositive(tie.t, "t");
  }

  LfcSystem sys;
  sys.areas = areas;
  sys.ties = ties;
  sys.integral_augmentation = integral_augmentation;
  sys.layout.resize(na);
  sys.tie_states.assign(ties.size(), -1);

  std::vector<AreaBlock> blocks;
  blocks.reserve(na);
  for (const AreaParams& p : areas) blocks.push_back(BuildAreaBlock(p));

  // State ordering.
  int n = 0;
  std::vector<std::string> state_labels;
  for (int i = 0; i < na; ++i) {
    const std::string tag = std::to_string(i + 1);
    AreaLayout& l = sys.layout[i];
    for (std::size_t s = 0; s < blocks[i].labels.size(); ++s) {
      l.internal_states.push_back(n++);
      state_labels.push_back(blocks[i].labels[s] + tag);
    }
    l.freq_state = l.internal_states.front();
    if (integral_augmentation) {
      l.integral_state = n++;
      state_labels.push_back("iACE" + tag);
    }
    for (std::size_t t = 0; t < ties.size(); ++t) {
      if (ties[t].from == i + 1) {
        sys.tie_states[t] = n++;
        state_labels.push_back("dPtie" + tag + std::to_string(ties[t].to));
      }
    }
  }
  for (std::size_t t = 0; t < ties.size(); ++t) {
    sys.layout[ties[t].from - 1].downstream_ties.push_back(sys.tie_states[t]);
    sys.layout[ties[t].to - 1].upstream_ties.push_back(sys.tie_states[t]);
  }

  const int m = 2 * na;
  const int p = (integral_augmentation ? 3 : 2) * na;
  StateSpaceModel& model = sys.model;
  model.a = MatrixXd::Zero(n, n);
  model.b = MatrixXd::Zero(n, m);
  model.c = MatrixXd::Zero(p, n);
  model.d = MatrixXd::Zero(p, m);
  model.state_labels = state_labels;

  sys.tie_injection = MatrixXd::Zero(na, n);
  for (std::size_t t = 0; t < ties.size(); ++t) {
    sys.tie_injection(ties[t].from - 1, sys.tie_states[t]) += 1.0;
    sys.tie_injection(ties[t].to - 1, sys.tie_states[t]) -= 1.0;
  }

  for (int i = 0; i < na; ++i) {
    const std::string tag = std::to_string(i + 1);
    AreaLayout& l = sys.layout[i];
    const AreaBlock& blk = blocks[i];
    const auto& idx = l.internal_states;
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t c = 0; c < idx.size(); ++c) {
        model.a(idx[r], idx[c]) = blk.a(r, c);
      }
      // Net tie export enters through the generator row.
      model.a.row(idx[r]) += blk.tie_column(r) * sys.tie_injection.row(i);
    }
    l.disturbance_input = 2 * i;
    l.control_input = 2 * i + 1;
    model.input_labels.push_back("dPd" + tag);
    model.input_labels.push_back("dPc" + tag);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      model.b(idx[r], l.disturbance_input) = blk.disturbance(r);
      model.b(idx[r], l.control_input) = blk.control(r);
    }
  }

  for (std::size_t t = 0; t < ties.size(); ++t) {
    const int row = sys.tie_states[t];
    model.a(row, sys.layout[ties[t].from - 1].freq_state) += ties[t].t;
    model.a(row, sys.layout[ties[t].to - 1].freq_state) -= ties[t].t;
  }

  // Outputs: ACE block, ΔF block, optional ∫ACE block.
  model.output_labels.resize(p);
  for (int i = 0; i < na; ++i) {
    const std::string tag = std::to_string(i + 1);
    AreaLayout& l = sys.layout[i];
    Eigen::RowVectorXd ace = sys.tie_injection.row(i);
    ace(l.freq_state) += areas[i].b;

    l.ace_output = i;
    model.c.row(i) = ace;
    model.output_labels[i] = "ACE" + tag;

    l.freq_output = na + i;
    model.c(na + i, l.freq_state) = 1.0;
    model.output_labels[na + i] = "dF" + tag;

    if (integral_augmentation) {
      model.a.row(l.integral_state) = ace;
      l.integral_output = 2 * na + i;
      model.c(2 * na + i, l.integral_state) = 1.0;
      model.output_labels[2 * na + i] = "IACE" + tag;
    }
  }
  model.Validate();
  return sys;
}

std::vector<AreaParams> DefaultAreas() {
  return {AreaParams::Defaults(AreaKind::kReheatSteam),
          AreaParams::Defaults(AreaKind::kReheatSteam),
          AreaParams::Defaults(AreaKind::kNonreheatSteam),
          AreaParams::Defaults(AreaKind::kHydro)};
}

std::vector<TieParams> DefaultChainTies(int area_count) {
  std::vector<TieParams> ties;
  for (int i = 1; i < area_count; ++i) ties.push_back({i, i + 1, 0.545});
  return ties;
}

LfcSystem BuildDefaultSystem(bool integral_augmentation) {
  return BuildSystem(DefaultAreas(), DefaultChainTies(4),
                     integral_augmentation);
}

SteadyStateReport SteadyStateCheck(const StateSpaceModel& model,
                                   const VectorXd& input) {
  model.Validate();
  if (input.size() != model.inputs()) {
    throw ValidationError("SteadyStateCheck: input length != model inputs");
  }
  SteadyStateReport report;
  const int n = model.states();
  Eigen::JacobiSVD<MatrixXd> svd(model.a, Eigen::ComputeFullV);
  const VectorXd& sv = svd.singularValues();
  const double threshold =
      1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++rank;
  }
  report.rank = rank;
  if (rank < n) {
    report.singular = true;
    report.null_space = svd.matrixV().rightCols(n - rank);
    return report;
  }
  report.equilibrium = model.a.partialPivLu().solve(-model.b * input);
  return report;
}

}  // namespace lfc
