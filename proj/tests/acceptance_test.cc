// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "lfc/commands.h"
#include "test_oracles.h"

#ifndef LFC_CONFIG_DIR
#define LFC_CONFIG_DIR "configs"
#endif

namespace {

using namespace lfc;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

// `charged_s` is shared setup time counted against this criterion's budget.
void Criterion(int id, const std::string& title, double budget_s,
               const std::function<void(Outcome&)>& body, double charged_s = 0.0) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs =
      charged_s +
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.Require(secs < budget_s, "runtime budget " + std::to_string(budget_s) + " s");
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s (%.2f s)%s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              secs, o.detail.str().c_str());
  std::fflush(stdout);
}

std::string Sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

VectorXd AllAreaStep(const LfcSystem& sys, double size) {
  VectorXd u = VectorXd::Zero(sys.model.inputs());
  for (const AreaLayout& l : sys.layout) u(l.disturbance_input) = size;
  return u;
}

DesignPlant RandomObservablePlant(int n, int p, int m, std::mt19937_64& rng) {
  while (true) {
    DesignPlant plant;
    plant.phi = oracle::RandomStable(n, rng, 0.95);
    plant.delta = oracle::Random(n, m, rng);
    plant.c = oracle::Random(p, n, rng);
    MatrixXd obs(n * p, n);
    MatrixXd row = plant.c;
    for (int i = 0; i < n; ++i) {
      obs.middleRows(i * p, p) = row;
      row = row * plant.phi;
    }
    if (oracle::RowReductionRank(obs) == n) return plant;
  }
}

struct Trajectory {
  std::vector<VectorXd> x, y, u;
};

Trajectory Simulate(const DesignPlant& plant, int steps, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  Trajectory t;
  VectorXd x = oracle::Random(static_cast<int>(plant.phi.rows()), 1, rng);
  for (int k = 0; k <= steps; ++k) {
    VectorXd u(plant.delta.cols());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = noise(rng);
    t.x.push_back(x);
    t.y.push_back(plant.c * x);
    t.u.push_back(u);
    x = plant.phi * x + plant.delta * u;
  }
  return t;
}

VectorXd Window(const Trajectory& t, int k, const MeasurementWindow& w) {
  VectorXd out(w.q());
  for (int r = 0; r < w.n_window; ++r) out.segment(r * w.p, w.p) = t.y[k - r];
  for (int s = 0; s < w.n_window - 1; ++s) {
    out.segment(w.z_size() + s * w.m, w.m) = t.u[k - 1 - s];
  }
  return out;
}

// Max one-step output prediction error after the N-sample warm-up.
double PredictionError(const DesignPlant& plant, const PredictionForm& pred, int steps,
                       std::mt19937_64& rng) {
  const MeasurementWindow& w = pred.window;
  const Trajectory t = Simulate(plant, steps + w.n_window, rng);
  double worst = 0.0;
  for (int k = w.n_window - 1; k < steps + w.n_window - 1; ++k) {
    const VectorXd wk = Window(t, k, w);
    VectorXd recent(w.m * w.n_window);
    recent.head(w.m) = t.u[k];
    recent.tail(w.v_size()) = wk.tail(w.v_size());
    const VectorXd y_pred = pred.alpha * wk.head(w.z_size()) + pred.beta * recent;
    const double scale = std::max(1.0, t.y[k + 1].cwiseAbs().maxCoeff());
    worst = std::max(worst, (y_pred - t.y[k + 1]).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

struct Design {
  RunConfig config;
  std::vector<GainFile> dp, ep;
  std::vector<double> dp_cost, ep_cost;
};

Design Synthesized(const std::string& config_file) {
  Design d;
  d.config = LoadConfig(std::string(LFC_CONFIG_DIR) + "/" + config_file);
  LoadMatrixFiles(d.config);
  const SynthesisRun dp = RunSynthesis(d.config, Method::kDp, DesignMode::kDecentral);
  const SynthesisRun ep = RunSynthesis(d.config, Method::kEp, DesignMode::kDecentral);
  d.dp = dp.files;
  d.ep = ep.files;
  for (const auto& o : dp.outputs) d.dp_cost.push_back(o.cost);
  for (const auto& o : ep.outputs) d.ep_cost.push_back(o.cost);
  return d;
}

int RegulatedSettled(const SimResult& r, double band) {
  int settled = 0;
  for (const MetricsRow& row : ResultMetrics(r, band)) {
    if (row.signal.rfind("u", 0) != 0 && row.metrics.settling_time) ++settled;
  }
  return settled;
}

std::map<std::string, std::string> CsvFiles(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = ss.str();
  }
  return out;
}

}  // namespace

int main() {
  Criterion(1, "model, decomposition and gain dimensions", 1.0, [](Outcome& o) {
    const LfcSystem sys = BuildDefaultSystem();
    o.Require(sys.model.states() == 18 && sys.model.inputs() == 8, "n = 18, 8 inputs");
    const ExpansionMap map = DefaultExpansion(sys);
    o.Require(map.BlockSizes() == std::vector<int>({5, 6, 5, 5}), "blocks [5,6,5,5]");
    const auto central = BuildDesignProblems(sys, DesignMode::kCentral, {});
    o.Require(central.size() == 1 && central[0].pred.window.m == 4 &&
                  central[0].pred.window.q() == 36,
              "central 4x36");
    const auto minimal = BuildDesignProblems(sys, DesignMode::kDecentral, {});
    o.Require(minimal[0].pred.window.m == 1 && minimal[0].pred.window.q() == 9,
              "subsystem 1 is 1x9");
    DesignOptions uniform;
    uniform.policy = WindowPolicy::kUniform;
    uniform.uniform_n = 5;
    const auto forced = BuildDesignProblems(sys, DesignMode::kDecentral, uniform);
    o.detail << " decentral q (minimal) =";
    for (const auto& p : minimal) o.detail << ' ' << p.pred.window.q();
    for (const auto& p : forced) o.Require(p.pred.window.q() == 9, p.label + " forced 1x9");
  });

  Criterion(2, "ZOH against closed forms and fine-step integration", 5.0, [](Outcome& o) {
    double worst = 0.0;
    for (double a : {-1.0, -0.5, 0.3, 2.0}) {
      StateSpaceModel m;
      m.a = MatrixXd::Constant(1, 1, a);
      m.b = MatrixXd::Constant(1, 1, 1.0);
      m.c = MatrixXd::Identity(1, 1);
      m.d = MatrixXd::Zero(1, 1);
      m.state_labels = {"x"};
      m.input_labels = {"u"};
      m.output_labels = {"y"};
      const DiscreteModel d = Zoh(m, 0.1);
      const auto [phi, delta] = oracle::ScalarZoh(a, 1.0, 0.1);
      worst = std::max({worst, std::abs(d.phi(0, 0) - phi), std::abs(d.delta(0, 0) - delta)});
    }
    StateSpaceModel di;
    di.a = MatrixXd::Zero(2, 2);
    di.a(0, 1) = 1.0;
    di.b = MatrixXd::Zero(2, 1);
    di.b(1, 0) = 1.0;
    di.c = MatrixXd::Identity(2, 2);
    di.d = MatrixXd::Zero(2, 1);
    di.state_labels = {"p", "v"};
    di.input_labels = {"u"};
    di.output_labels = {"p", "v"};
    const DiscreteModel dd = Zoh(di, 0.5);
    const auto [phi2, delta2] = oracle::DoubleIntegratorZoh(0.5);
    worst = std::max({worst, MaxAbs(dd.phi - phi2), MaxAbs(dd.delta - delta2)});
    o.Require(worst < 1e-10, "closed forms to 1e-10");

    const LfcSystem sys = BuildDefaultSystem();
    const double ts = 0.1;
    const DiscreteModel d = Zoh(sys.model, ts);
    const VectorXd u = AllAreaStep(sys, 0.01);
    const int steps = 200;
    const auto fine = oracle::Rk4(sys.model.a, sys.model.b, VectorXd::Zero(18),
                                  [&](double) { return u; }, ts, steps, 100);
    VectorXd x = VectorXd::Zero(18);
    double dev = 0.0;
    for (int k = 1; k <= steps; ++k) {
      x = d.phi * x + d.delta * u;
      dev = std::max(dev, (x - fine[k]).cwiseAbs().maxCoeff());
    }
    o.detail << " closed-form err " << Sci(worst) << ", 18-state dev " << Sci(dev);
    o.Require(dev < 1e-6, "18-state deviation < 1e-6");
  });

  Criterion(3, "inclusion principle with M = 0", 5.0, [](Outcome& o) {
    const LfcSystem sys = BuildDefaultSystem();
    const ExpansionMap map = DefaultExpansion(sys);
    const StateSpaceModel ex = Expand(sys.model, map);
    const VectorXd u = AllAreaStep(sys, 0.01);
    const double dt = 0.01;
    const int steps = 1000;
    const auto x = oracle::Rk4(sys.model.a, sys.model.b, VectorXd::Zero(18),
                               [&](double) { return u; }, dt, steps, 10);
    const auto xe = oracle::Rk4(ex.a, ex.b, VectorXd::Zero(21),
                                [&](double) { return u; }, dt, steps, 10);
    double worst = 0.0;
    for (int k = 0; k <= steps; ++k) {
      worst = std::max(worst, (xe[k] - map.t * x[k]).cwiseAbs().maxCoeff());
    }
    o.detail << " max |x~ - T x| = " << Sci(worst);
    o.Require(worst < 1e-8, "deviation < 1e-8");
  });

  Criterion(4, "one-step output prediction identity", 10.0, [](Outcome& o) {
    std::mt19937_64 rng(4);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 1 + trial % 6, p = 1 + trial % 2, m = 1 + (trial / 3) % 2;
      const DesignPlant plant = RandomObservablePlant(n, p, m, rng);
      worst = std::max(worst,
                       PredictionError(plant, BuildPrediction(plant, MinWindow(n, p)), 200, rng));
    }
    const LfcSystem sys = BuildDefaultSystem();
    const ExpansionMap map = DefaultExpansion(sys);
    double worst_sub = 0.0;
    for (const Subsystem& sub : ExtractSubsystems(sys.model, Expand(sys.model, map), map)) {
      const DiscreteModel dm = Zoh(sub.model, 0.1);
      const DesignPlant plant = MakeDesignPlant(dm, {sub.control_input}, {0});
      const PredictionForm pred =
          BuildPrediction(plant, MinWindow(dm.states(), 1), Reconstruction::kObservable);
      worst_sub = std::max(worst_sub, PredictionError(plant, pred, 200, rng));
    }
    o.detail << " random " << Sci(worst) << ", subsystems " << Sci(worst_sub);
    o.Require(worst < 1e-8 && worst_sub < 1e-8, "prediction error < 1e-8");
  });

  Criterion(5, "history-space cost equals state-space cost", 5.0, [](Outcome& o) {
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + trial % 4, p = 1 + trial % 2, m = 1 + trial % 3;
      const DesignPlant plant = RandomObservablePlant(n, p, m, rng);
      const PredictionForm pred = BuildPrediction(plant, MinWindow(n, p));
      const MatrixXd qs = oracle::RandomSpd(n, rng), hs = oracle::RandomSpd(m, rng);
      const TransformedCost cost = TransformCost(pred, qs, hs);
      const int big_n = pred.window.n_window;
      const Trajectory t = Simulate(plant, 100 + big_n, rng);
      double history = 0.0;
      std::vector<VectorXd> xs, us;
      for (int k = big_n - 1; k < 100 + big_n - 1; ++k) {
        const VectorXd wk = Window(t, k, pred.window);
        const VectorXd& u = t.u[k];
        history += wk.dot(cost.q_w * wk) + u.dot(cost.r_cross * wk) + u.dot(cost.s_u * u);
        xs.push_back(t.x[k + 1]);
        us.push_back(u);
      }
      const double direct = oracle::DirectCost(xs, us, qs, hs);
      worst = std::max(worst, std::abs(history - direct) / std::abs(direct));
    }
    o.detail << " max relative difference " << Sci(worst);
    o.Require(worst < 1e-8, "relative difference < 1e-8");
  });

  Criterion(6, "DP against Riccati LQR and scalar value iteration", 30.0, [](Outcome& o) {
    std::mt19937_64 rng(6);
    double worst_lqr = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 1 + trial % 4, m = 1 + trial % 2;
      DesignPlant plant;
      plant.phi = oracle::Random(n, n, rng);
      plant.delta = oracle::Random(n, m, rng);
      plant.c = MatrixXd::Identity(n, n);
      const MatrixXd qs = oracle::RandomSpd(n, rng), hs = oracle::RandomSpd(m, rng);
      const PredictionForm pred = BuildPrediction(plant, 1);
      const GainMatrix g = SolveDp(pred, TransformCost(pred, qs, hs), {1e-12, 200000});
      worst_lqr = std::max(worst_lqr,
                           MaxAbs(g.f + oracle::NextStateLqrGain(plant.phi, plant.delta, qs, hs)));
    }
    double worst_scalar = 0.0;
    std::uniform_real_distribution<double> th(-1.2, 1.2), om(0.2, 1.5), w(0.1, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
      const double theta = trial == 0 ? 0.9 : th(rng), omega = trial == 0 ? 0.5 : om(rng);
      const double q = trial == 0 ? 1.0 : w(rng), s = trial == 0 ? 1.0 : w(rng);
      TransformedCost c;
      c.q_w = MatrixXd::Constant(1, 1, q);
      c.r_cross = MatrixXd::Zero(1, 1);
      c.s_u = MatrixXd::Constant(1, 1, s);
      const GainMatrix g =
          SolveDp(c, MatrixXd::Constant(1, 1, theta), MatrixXd::Constant(1, 1, omega));
      worst_scalar = std::max(
          worst_scalar,
          std::abs(g.f(0, 0) - oracle::ScalarValueIterationGain(theta, omega, q, 0.0, s)));
    }
    o.detail << " LQR max-abs " << Sci(worst_lqr) << ", value iteration " << Sci(worst_scalar);
    o.Require(worst_lqr < 1e-6, "LQR gain to 1e-6");
    o.Require(worst_scalar < 1e-6, "value iteration to 1e-6");
  });

  Criterion(7, "EP within 5% of DP on subsystem 1", 120.0, [](Outcome& o) {
    const LfcSystem sys = BuildDefaultSystem();
    const auto problems = BuildDesignProblems(sys, DesignMode::kDecentral, {});
    const DesignProblem& p = problems[0];
    EpConfig ep;  // seed 42, population 50, 300 generations
    const SynthesisOutput dp = Synthesize(p, 0, Method::kDp, {}, ep);
    const SynthesisOutput a = Synthesize(p, 0, Method::kEp, {}, ep);
    const SynthesisOutput b = Synthesize(p, 0, Method::kEp, {}, ep);
    const double ratio = a.cost / dp.cost;
    o.detail << " DP " << Sci(dp.cost) << ", EP " << Sci(a.cost) << ", ratio " << ratio;
    o.Require(ratio <= 1.05, "EP cost <= 1.05 x DP cost");
    bool monotone = true;
    for (size_t g = 1; g < a.ep_trace.size(); ++g) {
      monotone &= a.ep_trace[g].best <= a.ep_trace[g - 1].best;
    }
    o.Require(monotone, "best-so-far trace non-increasing");
    bool same = a.gain.f == b.gain.f && a.cost == b.cost && a.ep_trace.size() == b.ep_trace.size();
    for (size_t g = 0; same && g < a.ep_trace.size(); ++g) {
      same = a.ep_trace[g].best == b.ep_trace[g].best && a.ep_trace[g].mean == b.ep_trace[g].mean;
    }
    o.Require(same, "rerun bit-identical");
  });

  // Gains shared by the closed-loop criteria.
  const auto synth_start = std::chrono::steady_clock::now();
  const Design base = Synthesized("base.json");
  const Design integral = Synthesized("integral.json");
  const double synth_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - synth_start).count();
  std::printf("# closed-loop designs synthesized in %.2f s (charged to criteria 8-10)\n",
              synth_s);

  Criterion(8, "test 1: stability, frequency decay, integral ACE residual", 30.0,
            [&](Outcome& o) {
    for (const auto& [name, gains] :
         {std::pair{"DP", &base.dp}, std::pair{"EP", &base.ep}}) {
      const SimResult r = RunTest(base.config, 1, *gains);
      o.detail << ' ' << name << " rho " << Sci(r.spectral_radius);
      o.Require(r.spectral_radius < 1.0, std::string(name) + " closed loop stable");
    }
    for (const auto& [name, gains] :
         {std::pair{"DP", &integral.dp}, std::pair{"EP", &integral.ep}}) {
      const SimResult r = RunTest(integral.config, 1, *gains);
      o.Require(r.spectral_radius < 1.0, std::string(name) + " integral variant stable");
      double worst_decay = 0.0, worst_residual = 0.0;
      const Eigen::Index last = r.time.size() - 1;
      const Eigen::Index tail = std::max<Eigen::Index>(1, (r.time.size() + 9) / 10);
      for (Eigen::Index i = 0; i < r.freq.cols(); ++i) {
        Eigen::Index at = 0;
        const double peak = r.freq.col(i).cwiseAbs().maxCoeff(&at);
        o.Require(at < last, "dF peak before the end of the horizon");
        worst_decay = std::max(worst_decay, std::abs(r.freq(last, i)) / peak);
        worst_residual =
            std::max(worst_residual, std::abs(r.ace.col(i).tail(tail).mean()));
      }
      o.detail << "; integral " << name << " rho " << Sci(r.spectral_radius)
               << ", |dF(end)|/peak " << Sci(worst_decay) << ", ACE residual "
               << Sci(worst_residual);
      o.Require(worst_decay < 0.1, std::string(name) + " dF decays below 10% of peak");
      o.Require(worst_residual < 1e-4, std::string(name) + " ACE residual < 1e-4");
    }
  }, synth_s);

  Criterion(9, "test 2: perturbed plant stays stable and settles", 30.0, [&](Outcome& o) {
    for (const auto& [name, gains] :
         {std::pair{"DP", &base.dp}, std::pair{"EP", &base.ep}}) {
      const SimResult r = RunTest(base.config, 2, *gains);
      const int settled = RegulatedSettled(r, base.config.band_fraction);
      o.detail << ' ' << name << " rho " << Sci(r.spectral_radius) << " settled " << settled
               << "/12";
      o.Require(r.spectral_radius < 1.0, std::string(name) + " stable");
      o.Require(settled == 12, std::string(name) + " all regulated signals settle");
    }
  }, synth_s);

  Criterion(10, "test 3: ramp tracking and decay after step removal", 30.0, [&](Outcome& o) {
    const ScenarioOptions& so = base.config.scenario;
    for (const auto& [name, gains] :
         {std::pair{"DP", &base.dp}, std::pair{"EP", &base.ep}}) {
      const SimResult step = RunTest(base.config, 1, *gains);
      const SimResult r = RunTest(base.config, 3, *gains);
      double ramp_err = 0.0, step_peak = 0.0, worst_decay = 0.0;
      const Eigen::Index last = r.time.size() - 1;
      for (Eigen::Index i = 0; i < r.ace.cols(); ++i) {
        step_peak = std::max(step_peak, step.ace.col(i).cwiseAbs().maxCoeff());
        double post_peak = 0.0;
        for (Eigen::Index k = 0; k <= last; ++k) {
          const double t = r.time(k);
          if (t >= so.ramp_start && t <= so.ramp_end) {
            ramp_err = std::max(ramp_err, std::abs(r.ace(k, i)));
          }
          if (t >= so.step_back_time) post_peak = std::max(post_peak, std::abs(r.freq(k, i)));
        }
        worst_decay = std::max(worst_decay, std::abs(r.freq(last, i)) / post_peak);
      }
      const int settled = RegulatedSettled(r, base.config.band_fraction);
      o.detail << ' ' << name << " ramp |ACE| " << Sci(ramp_err) << " (step peak "
               << Sci(step_peak) << "), post-removal decay " << Sci(worst_decay)
               << ", settled " << settled << "/12";
      o.Require(r.spectral_radius < 1.0, std::string(name) + " stable");
      o.Require(ramp_err <= step_peak, std::string(name) + " ramp error bounded by step peak");
      o.Require(worst_decay < 0.1, std::string(name) + " dF decays after step removal");
      o.Require(settled == 12, std::string(name) + " settling detected");
    }
  }, synth_s);

  Criterion(11, "pipeline CSV outputs byte-identical across runs", 180.0, [](Outcome& o) {
    const fs::path root = fs::temp_directory_path() / "lfc_acceptance_repro";
    fs::remove_all(root);
    const std::string cfg = std::string(LFC_CONFIG_DIR) + "/base.json";
    std::ostringstream sink;
    std::map<std::string, std::string> runs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = root / ("run" + std::to_string(rep));
      for (const char* method : {"dp", "ep"}) {
        const int code = RunCli(
            {"run", "-c", cfg, "--method", method, "-o", (out / method).string()}, sink, sink);
        o.Require(code == 0, std::string("run --method ") + method + " exit 0");
      }
      runs[rep] = CsvFiles(out);
    }
    o.detail << ' ' << runs[0].size() << " CSV files compared";
    o.Require(runs[0].size() >= 8, "CSV artifacts produced");
    o.Require(runs[0] == runs[1], "byte-identical");
    fs::remove_all(root);
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
