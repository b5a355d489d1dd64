#include "lfc/sim.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

namespace lfc {

PiecewiseLinear::PiecewiseLinear(std::vector<std::pair<double, double>> knots)
    : knots_(std::move(knots)) {
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (knots_[i].first < knots_[i - 1].first) {
      throw ValidationError("signal: knots must be sorted by time");
    }
  }
}

PiecewiseLinear PiecewiseLinear::Step(double at, double level) {
  return PiecewiseLinear({{at, 0.0}, {at, level}});
}

double PiecewiseLinear::operator()(double t) const {
  if (knots_.empty()) return 0.0;
  if (t < knots_.front().first) return knots_.front().second;
  if (t >= knots_.back().first) return knots_.back().second;
  auto upper = std::upper_bound(
      knots_.begin(), knots_.end(), t,
      [](double value, const auto& knot) { return value < knot.first; });
  const auto& hi = *upper;
  const auto& lo = *(upper - 1);
  const double frac = (t - lo.first) / (hi.first - lo.first);
  return lo.second + frac * (hi.second - lo.second);
}

Scenario MakeScenario(int test, int area_count, const ScenarioOptions& opt) {
  if (!(opt.duration > 0.0) || !(opt.ts > 0.0)) {
    throw ValidationError("scenario: duration and ts must be positive");
  }
  if (!(opt.param_factor > 0.0)) {
    throw ValidationError("scenario: param_factor must be positive");
  }
  Scenario s;
  s.duration = opt.duration;
  s.ts = opt.ts;
  switch (test) {
    case 1:
    case 2:
      s.label = test == 1 ? "test1" : "test2";
      s.disturbance.assign(area_count,
                           PiecewiseLinear::Step(opt.step_time, opt.step_size));
      if (test == 2) {
        s.scaling = {opt.param_factor, opt.param_factor, opt.param_factor,
                     opt.param_factor};
      }
      break;
    case 3:
      if (!(opt.ramp_start < opt.ramp_end && opt.ramp_end <= opt.step_back_time)) {
        throw ValidationError(
            "scenario: need ramp_start < ramp_end <= step_back_time");
      }
      s.label = "test3";
      s.disturbance.assign(
          area_count,
          PiecewiseLinear({{opt.ramp_start, 0.0},
                           {opt.ramp_end, opt.step_size},
                           {opt.step_back_time, opt.step_size},
                           {opt.step_back_time, 0.0}}));
      break;
    default:
      throw ValidationError("scenario: test must be 1, 2 or 3");
  }
  return s;
}

std::vector<Scenario> ScenarioLibrary(int area_count,
                                      const ScenarioOptions& opt) {
  return {MakeScenario(1, area_count, opt), MakeScenario(2, area_count, opt),
          MakeScenario(3, area_count, opt)};
}

std::pair<std::vector<AreaParams>, std::vector<TieParams>> ApplyParamVariation(
    const std::vector<AreaParams>& areas, const std::vector<TieParams>& ties,
    const ParameterScaling& scaling) {
  if (!(scaling.tp > 0 && scaling.r > 0 && scaling.b > 0 && scaling.tie > 0)) {
    throw ValidationError("param variation: factors must be positive");
  }
  auto out_areas = areas;
  auto out_ties = ties;
  for (AreaParams& a : out_areas) {
    a.tp *= scaling.tp;
    a.r *= scaling.r;
    a.b *= scaling.b;
  }
  for (TieParams& t : out_ties) t.t *= scaling.tie;
  return {out_areas, out_ties};
}

SignalMetrics ComputeMetrics(const VectorXd& time, const VectorXd& series,
                             double band) {
  if (!(band >= 0.0)) throw ValidationError("metrics: band must be non-negative");
  if (time.size() != series.size()) {
    throw ValidationError("metrics: time and series lengths differ");
  }
  SignalMetrics m;
  const Eigen::Index len = series.size();
  if (len == 0) return m;
  m.peak = series.cwiseAbs().maxCoeff();

  const Eigen::Index tail =
      std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(0.1 * len)));
  m.residual = series.tail(tail).mean();

  // The band is centred on the terminal value, so a loop without integral
  // action settles onto its droop offset.
  Eigen::Index first_inside = len;
  for (Eigen::Index k = len - 1; k >= 0; --k) {
    if (!(std::abs(series(k) - m.residual) <= band)) break;
    first_inside = k;
  }
  if (first_inside < len) m.settling_time = time(first_inside);
  return m;
}

namespace {

void ValidateWiring(const LfcSystem& sys, const DiscreteModel& plant,
                    const std::vector<ControllerSpec>& controllers,
                    const Scenario* scenario) {
  if (plant.states() != sys.model.states() ||
      plant.inputs() != sys.model.inputs() ||
      plant.outputs() != sys.model.outputs()) {
    throw ValidationError("simulate: plant does not match system layout");
  }
  if (scenario) {
    if (std::abs(scenario->ts - plant.ts) > 1e-12) {
      throw ValidationError("simulate: ts mismatch between scenario and plant");
    }
    if (static_cast<int>(scenario->disturbance.size()) != sys.area_count()) {
      throw ValidationError("simulate: one disturbance signal per area required");
    }
  }
  std::set<int> used_columns;
  for (const ControllerSpec& c : controllers) {
    const int p = static_cast<int>(c.measured_rows.size());
    const int m = static_cast<int>(c.control_columns.size());
    const MeasurementWindow& w = c.gain.window;
    if (w.p != p || w.m != m || c.gain.f.rows() != m ||
        c.gain.f.cols() != w.q()) {
      throw ValidationError("simulate: window/output mismatch for controller");
    }
    for (int r : c.measured_rows) {
      if (r < 0 || r >= plant.outputs()) {
        throw ValidationError("simulate: measured row out of range");
      }
    }
    for (int col : c.control_columns) {
      if (col < 0 || col >= plant.inputs() || !used_columns.insert(col).second) {
        throw ValidationError("simulate: invalid or shared control column");
      }
    }
  }
}

void RecordSample(const LfcSystem& sys, const DiscreteModel& plant,
                  const VectorXd& x, const VectorXd& u_full, int k,
                  SimResult& out) {
  const VectorXd y = plant.c * x;
  for (int i = 0; i < sys.area_count(); ++i) {
    const AreaLayout& l = sys.layout[i];
    out.freq(k, i) = x(l.freq_state);
    out.ace(k, i) = y(l.ace_output);
    out.control(k, i) = u_full(l.control_input);
  }
  out.tie.row(k) = (sys.tie_injection * x).transpose();
  out.states.row(k) = x.transpose();
}

SimResult AllocateResult(const LfcSystem& sys, int steps, double ts) {
  SimResult r;
  const int na = sys.area_count();
  r.time = VectorXd(steps + 1);
  for (int k = 0; k <= steps; ++k) r.time(k) = k * ts;
  r.freq = MatrixXd::Zero(steps + 1, na);
  r.ace = MatrixXd::Zero(steps + 1, na);
  r.tie = MatrixXd::Zero(steps + 1, na);
  r.control = MatrixXd::Zero(steps + 1, na);
  r.states = MatrixXd::Zero(steps + 1, sys.model.states());
  return r;
}

VectorXd DisturbanceAt(const LfcSystem& sys, const Scenario& s, int k) {
  VectorXd d(sys.area_count());
  for (int i = 0; i < sys.area_count(); ++i) d(i) = s.disturbance[i](k * s.ts);
  return d;
}

}  // namespace

AugmentedLoop BuildAugmentedLoop(const LfcSystem& sys,
                                 const DiscreteModel& plant,
                                 const std::vector<ControllerSpec>& controllers) {
  ValidateWiring(sys, plant, controllers, nullptr);
  const int n = plant.states();
  const int na = sys.area_count();
  std::vector<int> offset;
  int dim = n;
  for (const ControllerSpec& c : controllers) {
    offset.push_back(dim);
    const MeasurementWindow& w = c.gain.window;
    dim += (w.n_window - 1) * (w.p + w.m);
  }

  // Control inputs as a row map over X.
  MatrixXd u_map = MatrixXd::Zero(plant.inputs(), dim);
  std::vector<MatrixXd> ctrl_rows;
  for (std::size_t ci = 0; ci < controllers.size(); ++ci) {
    const ControllerSpec& c = controllers[ci];
    const MeasurementWindow& w = c.gain.window;
    const MatrixXd cy = plant.c(c.measured_rows, Eigen::all);
    MatrixXd rows = MatrixXd::Zero(w.m, dim);
    rows.leftCols(n) = c.gain.f.leftCols(w.p) * cy;
    const int hist = w.q() - w.p;
    if (hist > 0) rows.middleCols(offset[ci], hist) = c.gain.f.rightCols(hist);
    for (int j = 0; j < w.m; ++j) u_map.row(c.control_columns[j]) = rows.row(j);
    ctrl_rows.push_back(std::move(rows));
  }

  MatrixXd e_d = MatrixXd::Zero(plant.inputs(), na);
  for (int i = 0; i < na; ++i) e_d(sys.layout[i].disturbance_input, i) = 1.0;

  AugmentedLoop loop;
  loop.plant_states = n;
  loop.a = MatrixXd::Zero(dim, dim);
  loop.b = MatrixXd::Zero(dim, na);
  loop.a.topLeftCorner(n, n) = plant.phi;
  loop.a.topRows(n) += plant.delta * u_map;
  loop.b.topRows(n) = plant.delta * e_d;

  for (std::size_t ci = 0; ci < controllers.size(); ++ci) {
    const ControllerSpec& c = controllers[ci];
    const MeasurementWindow& w = c.gain.window;
    if (w.n_window == 1) continue;
    const int o = offset[ci];
    const int p = w.p, m = w.m, hn = w.n_window - 1;
    const MatrixXd cy = plant.c(c.measured_rows, Eigen::all);
    // y history: newest slot takes y[k], the rest shift down.
    loop.a.block(o, 0, p, n) = cy;
    for (int s = 1; s < hn; ++s) {
      loop.a.block(o + s * p, o + (s - 1) * p, p, p).setIdentity();
    }
    // u history: newest slot takes u[k].
    const int ou = o + hn * p;
    loop.a.middleRows(ou, m) = ctrl_rows[ci];
    for (int s = 1; s < hn; ++s) {
      loop.a.block(ou + s * m, ou + (s - 1) * m, m, m).setIdentity();
    }
  }
  return loop;
}

SimResult SimulateClosedLoop(const LfcSystem& sys, const DiscreteModel& plant,
                             const std::vector<ControllerSpec>& controllers,
                             const Scenario& scenario) {
  ValidateWiring(sys, plant, controllers, &scenario);
  const int steps = static_cast<int>(std::floor(scenario.duration / scenario.ts + 1e-9));
  SimResult out = AllocateResult(sys, steps, scenario.ts);

  struct Buffers {
    std::deque<VectorXd> y;  // newest first, N entries
    std::deque<VectorXd> u;  // newest first, N−1 entries
  };
  std::vector<Buffers> buffers;
  for (const ControllerSpec& c : controllers) {
    const MeasurementWindow& w = c.gain.window;
    buffers.push_back({std::deque<VectorXd>(w.n_window, VectorXd::Zero(w.p)),
                       std::deque<VectorXd>(w.n_window - 1, VectorXd::Zero(w.m))});
  }

  VectorXd x = VectorXd::Zero(plant.states());
  VectorXd u_full(plant.inputs());
  for (int k = 0; k <= steps; ++k) {
    u_full.setZero();
    const VectorXd d = DisturbanceAt(sys, scenario, k);
    for (int i = 0; i < sys.area_count(); ++i) {
      u_full(sys.layout[i].disturbance_input) = d(i);
    }
    const VectorXd y = plant.c * x;
    for (std::size_t ci = 0; ci < controllers.size(); ++ci) {
      const ControllerSpec& c = controllers[ci];
      const MeasurementWindow& w = c.gain.window;
      Buffers& buf = buffers[ci];
      VectorXd meas(w.p);
      for (int r = 0; r < w.p; ++r) meas(r) = y(c.measured_rows[r]);
      buf.y.push_front(meas);
      buf.y.pop_back();

      VectorXd hist(w.q());
      int pos = 0;
      for (const VectorXd& v : buf.y) {
        hist.segment(pos, w.p) = v;
        pos += w.p;
      }
      for (const VectorXd& v : buf.u) {
        hist.segment(pos, w.m) = v;
        pos += w.m;
      }
      const VectorXd u = c.gain.f * hist;
      if (w.n_window > 1) {
        buf.u.push_front(u);
        buf.u.pop_back();
      }
      for (int j = 0; j < w.m; ++j) u_full(c.control_columns[j]) += u(j);
    }
    RecordSample(sys, plant, x, u_full, k, out);
    if (k < steps) x = plant.phi * x + plant.delta * u_full;
  }

  const AugmentedLoop loop = BuildAugmentedLoop(sys, plant, controllers);
  out.spectral_radius = SpectralRadius(loop.a);
  out.stable = out.spectral_radius < 1.0;
  return out;
}

SimResult SimulateAugmented(const LfcSystem& sys, const DiscreteModel& plant,
                            const std::vector<ControllerSpec>& controllers,
                            const Scenario& scenario) {
  ValidateWiring(sys, plant, controllers, &scenario);
  const AugmentedLoop loop = BuildAugmentedLoop(sys, plant, controllers);
  const int steps = static_cast<int>(std::floor(scenario.duration / scenario.ts + 1e-9));
  SimResult out = AllocateResult(sys, steps, scenario.ts);
  const int n = loop.plant_states;

  VectorXd big_x = VectorXd::Zero(loop.a.rows());
  for (int k = 0; k <= steps; ++k) {
    const VectorXd d = DisturbanceAt(sys, scenario, k);
    const VectorXd next = loop.a * big_x + loop.b * d;

    // u[k] sits in the newest u-slot of each controller's register at k+1;
    // N = 1 controllers have no register, so evaluate f·y directly.
    VectorXd u_full = VectorXd::Zero(plant.inputs());
    for (int i = 0; i < sys.area_count(); ++i) {
      u_full(sys.layout[i].disturbance_input) = d(i);
    }
    int offset = n;
    const VectorXd y = plant.c * big_x.head(n);
    for (const ControllerSpec& c : controllers) {
      const MeasurementWindow& w = c.gain.window;
      const int hn = w.n_window - 1;
      VectorXd u;
      if (hn == 0) {
        u = c.gain.f * y(c.measured_rows);
      } else {
        u = next.segment(offset + hn * w.p, w.m);
      }
      for (int j = 0; j < w.m; ++j) u_full(c.control_columns[j]) = u(j);
      offset += hn * (w.p + w.m);
    }
    RecordSample(sys, plant, big_x.head(n), u_full, k, out);
    big_x = next;
  }
  out.spectral_radius = SpectralRadius(loop.a);
  out.stable = out.spectral_radius < 1.0;
  return out;
}

std::vector<MetricsRow> ResultMetrics(const SimResult& result,
                                      double band_fraction) {
  std::vector<MetricsRow> rows;
  const auto add = [&](const MatrixXd& series, const std::string& name) {
    for (Eigen::Index i = 0; i < series.cols(); ++i) {
      const VectorXd col = series.col(i);
      const double peak = col.size() ? col.cwiseAbs().maxCoeff() : 0.0;
      const double band = peak > 0.0 ? band_fraction * peak
                                      : std::numeric_limits<double>::min();
      rows.push_back({name + std::to_string(i + 1),
                      ComputeMetrics(result.time, col, band)});
    }
  };
  add(result.freq, "dF");
  add(result.ace, "ACE");
  add(result.tie, "dPtie");
  add(result.control, "u");
  return rows;
}

}  // namespace lfc
