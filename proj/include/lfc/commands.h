#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lfc/config.h"
#include "lfc/gain_io.h"

namespace lfc {

/// Exit statuses of the command-line front end.
enum ExitCode { kExitOk = 0, kExitNumeric = 1, kExitUsage = 2 };

/// "lfc <version> config_hash <hash>", the first comment line of every
/// artifact.
std::string ProvenanceLine(const RunConfig& config);

std::string ModelSummary(const RunConfig& config, const LfcSystem& system);

struct SynthesisRun {
  std::vector<DesignProblem> problems;
  std::vector<SynthesisOutput> outputs;
  std::vector<GainFile> files;
};

/// Builds the design problems of `config` and synthesizes one gain each.
SynthesisRun RunSynthesis(const RunConfig& config, Method method, DesignMode mode);

/// Checks that the gains plug into `system` sampled at `ts` without
/// overlapping controls. Throws ValidationError otherwise.
void CheckGainsAgainstModel(const std::vector<GainFile>& gains,
                            const LfcSystem& system, double ts);

/// Scenario `test` on the plant of `config` (perturbed for test 2) closed
/// by `gains`.
SimResult RunTest(const RunConfig& config, int test,
                  const std::vector<GainFile>& gains);

/// Columns t, dF1..dFn, ACE1..ACEn, dPtie1..dPtien, u1..un at 15
/// significant digits, after `header` comment lines.
void WriteSimCsv(std::ostream& out, const SimResult& result,
                 const std::vector<std::string>& header);
void WriteMetricsCsv(std::ostream& out, const SimResult& result,
                     const std::vector<MetricsRow>& rows,
                     const std::vector<std::string>& header);
void WriteEpTraceCsv(std::ostream& out, const std::vector<EpGeneration>& trace,
                     const std::vector<std::string>& header);

/// Output directory: `cli_out` when non-empty, else $LFC_OUT_DIR, else the
/// config value.
std::string ResolveOutputDir(const std::string& cli_out, const RunConfig& config);

/// Entry point; `args` excludes the program name. Returns an ExitCode.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lfc
