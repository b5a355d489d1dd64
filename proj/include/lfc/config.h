#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "lfc/design.h"

namespace lfc {

/// Malformed or unknown configuration; the message names the key.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct RunConfig {
  std::vector<AreaParams> areas = DefaultAreas();
  std::vector<TieParams> ties = DefaultChainTies(4);
  bool integral_augmentation = false;

  std::optional<std::string> complementary_file;
  DesignOptions design;
  std::map<std::string, std::string> q_s_files;  // design label → path
  std::map<std::string, std::string> h_s_files;

  DpConfig dp;
  EpConfig ep;
  ScenarioOptions scenario;  // scenario.ts mirrors design.ts
  double band_fraction = 0.02;

  std::uint64_t seed = 42;
  std::string output_dir = "lfc_out";
};

/// Every section and key is optional; unknown keys are fatal. Relative file
/// paths resolve against `base_dir`.
RunConfig ParseConfig(const nlohmann::json& doc, const std::string& base_dir = ".");
RunConfig LoadConfig(const std::string& path);

/// Resolved configuration as a canonical document (sorted keys, all
/// defaults filled in).
nlohmann::json ToJson(const RunConfig& config);

/// 16 hex digits of FNV-1a over the canonical document.
std::string ConfigHash(const RunConfig& config);

LfcSystem BuildSystemFromConfig(const RunConfig& config);

/// Reads the weight/complementary matrices named in the config into
/// `config.design`.
void LoadMatrixFiles(RunConfig& config);

/// Whitespace-separated rows, '#' comments.
MatrixXd ReadMatrixFile(const std::string& path);

}  // namespace lfc
