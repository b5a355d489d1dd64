#include "lfc/commands.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include "lfc/svg_plot.h"

#ifndef LFC_VERSION
#define LFC_VERSION "dev"
#endif

namespace lfc {

namespace fs = std::filesystem;

namespace {

std::string Fmt(double v, const char* fmt = "%.15g") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string Join(const std::vector<std::string>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i];
  return s;
}

void Header(std::ostream& out, const std::vector<std::string>& header) {
  for (const std::string& line : header) out << "# " << line << "\n";
}

std::ofstream OpenOut(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string GainFileName(Method method, DesignMode mode, const std::string& label) {
  return ToString(method) + "_" + ToString(mode) + "_" + label + ".gain";
}

}  // namespace

std::string ProvenanceLine(const RunConfig& config) {
  return std::string("lfc ") + LFC_VERSION + " config_hash " + ConfigHash(config);
}

std::string ModelSummary(const RunConfig& config, const LfcSystem& system) {
  const StateSpaceModel& m = system.model;
  std::ostringstream os;
  os << "# " << ProvenanceLine(config) << "\n";
  os << "areas " << system.area_count() << "\n";
  os << "states " << m.states() << "\n";
  os << "inputs " << m.inputs() << "\n";
  os << "outputs " << m.outputs() << "\n";
  os << "integral_augmentation " << (system.integral_augmentation ? "true" : "false") << "\n";
  os << "state_labels " << Join(m.state_labels) << "\n";
  os << "input_labels " << Join(m.input_labels) << "\n";
  os << "output_labels " << Join(m.output_labels) << "\n";
  const ExpansionMap map = DefaultExpansion(system);
  os << "expanded_blocks";
  for (int s : map.BlockSizes()) os << ' ' << s;
  os << "\n";

  Eigen::EigenSolver<MatrixXd> solver(m.a, false);
  if (solver.info() != Eigen::Success) throw NumericError("model: eigenvalues did not converge");
  std::vector<std::complex<double>> eig(solver.eigenvalues().begin(),
                                        solver.eigenvalues().end());
  std::sort(eig.begin(), eig.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  os << "eigenvalues " << eig.size() << "\n";
  for (const auto& e : eig) {
    // Conjugate pairs come out of the solver exactly symmetric; tidy zeros.
    const double im = std::abs(e.imag()) < 1e-14 ? 0.0 : e.imag();
    os << Fmt(e.real(), "%.10g") << ' ' << Fmt(im, "%.10g") << "\n";
  }
  return os.str();
}

SynthesisRun RunSynthesis(const RunConfig& config, Method method, DesignMode mode) {
  SynthesisRun run;
  const LfcSystem system = BuildSystemFromConfig(config);
  run.problems = BuildDesignProblems(system, mode, config.design);
  const std::string hash = ConfigHash(config);
  for (size_t i = 0; i < run.problems.size(); ++i) {
    const DesignProblem& prob = run.problems[i];
    SynthesisOutput out = Synthesize(prob, static_cast<int>(i), method, config.dp, config.ep);
    GainFile file;
    file.gain = out.gain;
    file.label = prob.label;
    file.measured_rows = prob.measured_rows;
    file.control_columns = prob.control_columns;
    file.config_hash = hash;
    file.version = LFC_VERSION;
    file.ts = config.design.ts;
    run.outputs.push_back(std::move(out));
    run.files.push_back(std::move(file));
  }
  return run;
}

void CheckGainsAgainstModel(const std::vector<GainFile>& gains,
                            const LfcSystem& system, double ts) {
  if (gains.empty()) throw ValidationError("simulate: no gain files given");
  std::set<int> controls;
  const StateSpaceModel& m = system.model;
  for (const GainFile& g : gains) {
    const std::string name = g.label.empty() ? "gain" : "gain '" + g.label + "'";
    for (int r : g.measured_rows) {
      if (r < 0 || r >= m.outputs()) {
        throw ValidationError(name + ": measured row " + std::to_string(r) +
                              " does not exist in a model with " +
                              std::to_string(m.outputs()) + " outputs");
      }
    }
    for (int c : g.control_columns) {
      bool is_control = false;
      for (const AreaLayout& l : system.layout) is_control |= l.control_input == c;
      if (!is_control) {
        throw ValidationError(name + ": column " + std::to_string(c) +
                              " is not a control input of the model");
      }
      if (!controls.insert(c).second) {
        throw ValidationError(name + ": control column " + std::to_string(c) +
                              " is driven by another gain");
      }
    }
    if (g.ts > 0.0 && std::abs(g.ts - ts) > 1e-12 * std::max(1.0, ts)) {
      throw ValidationError(name + ": designed for ts = " + Fmt(g.ts, "%.6g") +
                            " but the config samples at ts = " + Fmt(ts, "%.6g"));
    }
  }
}

SimResult RunTest(const RunConfig& config, int test, const std::vector<GainFile>& gains) {
  const LfcSystem nominal = BuildSystemFromConfig(config);
  CheckGainsAgainstModel(gains, nominal, config.design.ts);
  ScenarioOptions opt = config.scenario;
  opt.ts = config.design.ts;
  const Scenario scenario = MakeScenario(test, nominal.area_count(), opt);
  const auto [areas, ties] = ApplyParamVariation(config.areas, config.ties, scenario.scaling);
  const LfcSystem plant = BuildSystem(areas, ties, config.integral_augmentation);
  std::vector<ControllerSpec> controllers;
  for (const GainFile& g : gains) {
    controllers.push_back({g.gain, g.measured_rows, g.control_columns});
  }
  return SimulateClosedLoop(plant, Zoh(plant.model, opt.ts), controllers, scenario);
}

void WriteSimCsv(std::ostream& out, const SimResult& r,
                 const std::vector<std::string>& header) {
  Header(out, header);
  const Eigen::Index na = r.freq.cols();
  out << "t";
  for (const char* name : {"dF", "ACE", "dPtie", "u"}) {
    for (Eigen::Index i = 0; i < na; ++i) out << ',' << name << i + 1;
  }
  out << "\n";
  for (Eigen::Index k = 0; k < r.time.size(); ++k) {
    out << Fmt(r.time(k));
    for (const MatrixXd* block : {&r.freq, &r.ace, &r.tie, &r.control}) {
      for (Eigen::Index i = 0; i < na; ++i) out << ',' << Fmt((*block)(k, i));
    }
    out << "\n";
  }
}

void WriteMetricsCsv(std::ostream& out, const SimResult& r,
                     const std::vector<MetricsRow>& rows,
                     const std::vector<std::string>& header) {
  Header(out, header);
  out << "# spectral_radius " << Fmt(r.spectral_radius) << " stable "
      << (r.stable ? "true" : "false") << "\n";
  out << "signal,peak,settling_time,residual\n";
  for (const MetricsRow& row : rows) {
    out << row.signal << ',' << Fmt(row.metrics.peak) << ','
        << (row.metrics.settling_time ? Fmt(*row.metrics.settling_time) : "none") << ','
        << Fmt(row.metrics.residual) << "\n";
  }
}

void WriteEpTraceCsv(std::ostream& out, const std::vector<EpGeneration>& trace,
                     const std::vector<std::string>& header) {
  Header(out, header);
  out << "generation,best,mean,worst\n";
  for (const EpGeneration& g : trace) {
    out << g.generation << ',' << Fmt(g.best) << ',' << Fmt(g.mean) << ','
        << Fmt(g.worst) << "\n";
  }
}

std::string ResolveOutputDir(const std::string& cli_out, const RunConfig& config) {
  if (!cli_out.empty()) return cli_out;
  if (const char* env = std::getenv("LFC_OUT_DIR"); env && *env) return env;
  return config.output_dir;
}

namespace {

struct Context {
  std::string config_path;
  std::string out_dir;
  RunConfig config;
  fs::path out;
};

void Prepare(Context& ctx) {
  ctx.config = ctx.config_path.empty() ? RunConfig{} : LoadConfig(ctx.config_path);
  LoadMatrixFiles(ctx.config);
  ctx.out = ResolveOutputDir(ctx.out_dir, ctx.config);
}

int CmdModel(Context& ctx, std::ostream& out) {
  const LfcSystem system = BuildSystemFromConfig(ctx.config);
  const std::string summary = ModelSummary(ctx.config, system);
  std::ofstream file = OpenOut(ctx.out / "model_summary.txt");
  file << summary;
  out << summary;
  return kExitOk;
}

int CmdSynthesize(Context& ctx, Method method, DesignMode mode, std::ostream& out,
                  std::ostream& err, std::vector<std::string>* written = nullptr) {
  const SynthesisRun run = RunSynthesis(ctx.config, method, mode);
  const std::string prov = ProvenanceLine(ctx.config);
  int code = kExitOk;
  for (size_t i = 0; i < run.files.size(); ++i) {
    const GainFile& file = run.files[i];
    const SynthesisOutput& res = run.outputs[i];
    const fs::path path = ctx.out / "gains" / GainFileName(method, mode, file.label);
    fs::create_directories(path.parent_path());
    WriteGainFile(path.string(), file);
    if (written) written->push_back(path.string());
    if (method == Method::kEp) {
      std::ofstream trace = OpenOut(ctx.out / "traces" /
                                    ("ep_" + ToString(mode) + "_" + file.label + ".csv"));
      WriteEpTraceCsv(trace, res.ep_trace, {prov, "label " + file.label});
    }
    out << file.label << ' ' << ToString(file.gain.provenance) << ' '
        << file.gain.f.rows() << 'x' << file.gain.f.cols() << " rho "
        << Fmt(file.gain.spectral_radius, "%.6g") << " cost " << Fmt(res.cost, "%.10g")
        << " -> " << path.string() << "\n";
    if (res.warning) {
      err << "warning: " << file.label << ": " << *res.warning << "\n";
      code = kExitNumeric;
    }
    if (!(file.gain.spectral_radius < 1.0)) {
      err << "error: " << file.label << ": design closed loop is unstable\n";
      code = kExitNumeric;
    }
  }
  return code;
}

int CmdSimulate(Context& ctx, int test, const std::vector<std::string>& gain_paths,
                std::ostream& out, std::ostream& err) {
  std::vector<GainFile> gains;
  for (const std::string& p : gain_paths) {
    if (!fs::exists(p)) throw ValidationError("gain file '" + p + "' does not exist");
    gains.push_back(ReadGainFile(p));
  }
  const SimResult result = RunTest(ctx.config, test, gains);
  const std::vector<MetricsRow> metrics = ResultMetrics(result, ctx.config.band_fraction);
  const std::vector<std::string> header = {ProvenanceLine(ctx.config),
                                           "test " + std::to_string(test)};
  const fs::path dir = ctx.out / ("test" + std::to_string(test));
  {
    std::ofstream f = OpenOut(dir / "timeseries.csv");
    WriteSimCsv(f, result, header);
  }
  {
    std::ofstream f = OpenOut(dir / "metrics.csv");
    WriteMetricsCsv(f, result, metrics, header);
  }
  fs::create_directories(dir / "plots");
  const std::string comment = header[0] + " test " + std::to_string(test);
  for (Eigen::Index i = 0; i < result.freq.cols(); ++i) {
    const std::string n = std::to_string(i + 1);
    LinePlot plot;
    plot.comment = comment;
    plot.x_label = "t [s]";
    plot.title = "Test " + std::to_string(test) + ": frequency deviation, area " + n;
    plot.y_label = "dF" + n + " [Hz]";
    WriteLinePlot((dir / "plots" / ("dF" + n + ".svg")).string(), plot, result.time,
                  result.freq.col(i));
    plot.title = "Test " + std::to_string(test) + ": area control error, area " + n;
    plot.y_label = "ACE" + n + " [pu]";
    WriteLinePlot((dir / "plots" / ("ACE" + n + ".svg")).string(), plot, result.time,
                  result.ace.col(i));
  }
  int settled = 0, regulated = 0;
  for (const MetricsRow& row : metrics) {
    if (row.signal.rfind("u", 0) == 0) continue;
    ++regulated;
    settled += row.metrics.settling_time.has_value();
  }
  out << "test " << test << " rho " << Fmt(result.spectral_radius, "%.6g") << " stable "
      << (result.stable ? "true" : "false") << " settled " << settled << '/' << regulated
      << " -> " << dir.string() << "\n";
  if (!result.stable) {
    err << "error: test " << test << ": closed loop is unstable\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Load-frequency control design toolkit"};
  app.require_subcommand(1);
  Context ctx;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", ctx.config_path, "JSON configuration file");
    sub->add_option("-o,--out", ctx.out_dir, "output directory (overrides LFC_OUT_DIR)");
  };

  CLI::App* model = app.add_subcommand("model", "write the model summary");
  common(model);

  std::string method_name = "dp", mode_name = "decentral";
  CLI::App* synth = app.add_subcommand("synthesize", "synthesize gains");
  common(synth);
  synth->add_option("--method", method_name, "dp | ep")
      ->check(CLI::IsMember({"dp", "ep"}));
  synth->add_option("--mode", mode_name, "central | decentral")
      ->check(CLI::IsMember({"central", "decentral"}));

  int test = 1;
  std::vector<std::string> gain_paths;
  CLI::App* sim = app.add_subcommand("simulate", "simulate one test scenario");
  common(sim);
  sim->add_option("--test", test, "1 | 2 | 3")->required()->check(CLI::Range(1, 3));
  sim->add_option("--gains", gain_paths, "gain files")->required();

  std::vector<int> tests = {1, 2, 3};
  CLI::App* run = app.add_subcommand("run", "model, synthesize and simulate");
  common(run);
  run->add_option("--method", method_name, "dp | ep")->check(CLI::IsMember({"dp", "ep"}));
  run->add_option("--mode", mode_name, "central | decentral")
      ->check(CLI::IsMember({"central", "decentral"}));
  run->add_option("--tests", tests, "tests to simulate")->check(CLI::Range(1, 3));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Prepare(ctx);
    const Method method = MethodFromString(method_name);
    const DesignMode mode = DesignModeFromString(mode_name);
    if (model->parsed()) return CmdModel(ctx, out);
    if (synth->parsed()) return CmdSynthesize(ctx, method, mode, out, err);
    if (sim->parsed()) return CmdSimulate(ctx, test, gain_paths, out, err);

    int code = CmdModel(ctx, out);
    std::vector<std::string> written;
    code = std::max(code, CmdSynthesize(ctx, method, mode, out, err, &written));
    for (int t : tests) code = std::max(code, CmdSimulate(ctx, t, written, out, err));
    return code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace lfc
