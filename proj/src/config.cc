#include "lfc/config.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace lfc {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were read so that the
// leftovers can be reported.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(Where() + ": expected an object");
  }

  bool Has(const std::string& key) const { return node_.contains(key); }

  template <typename T>
  void Read(const std::string& key, T& out) {
    if (!node_.contains(key)) return;
    seen_.insert(key);
    const json& v = node_.at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError("");
        out = v.get<double>();
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
        out = v.get<bool>();
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.get<long long>() < 0) throw ConfigError("");
        }
        out = v.get<T>();
      } else {
        if (!v.is_string()) throw ConfigError("");
        out = v.get<std::string>();
      }
    } catch (const ConfigError&) {
      throw ConfigError("config key '" + Key(key) + "' has the wrong type");
    }
  }

  const json& Child(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  std::string Key(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void Finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError("unknown config key '" + Key(it.key()) + "'");
      }
    }
  }

 private:
  std::string Where() const { return path_.empty() ? "config" : "config key '" + path_ + "'"; }
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string Resolve(const std::string& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

void ReadArea(const json& node, const std::string& path, AreaParams& a) {
  Section s(node, path);
  std::string kind = ToString(a.kind);
  s.Read("kind", kind);
  try {
    a = AreaParams::Defaults(AreaKindFromString(kind));
  } catch (const ValidationError& e) {
    throw ConfigError("config key '" + s.Key("kind") + "': " + e.what());
  }
  s.Read("tp", a.tp);
  s.Read("kp", a.kp);
  s.Read("tg", a.tg);
  s.Read("tt", a.tt);
  s.Read("tr", a.tr);
  s.Read("kr", a.kr);
  s.Read("tw", a.tw);
  s.Read("t_reset", a.t_reset);
  s.Read("t_comp", a.t_comp);
  s.Read("r", a.r);
  s.Read("b", a.b);
  s.Finish();
}

void ReadFileMap(Section& parent, const std::string& key,
                 std::map<std::string, std::string>& out, const std::string& base) {
  if (!parent.Has(key)) return;
  const json& node = parent.Child(key);
  if (!node.is_object()) throw ConfigError("config key '" + parent.Key(key) + "' must be an object");
  for (auto it = node.begin(); it != node.end(); ++it) {
    if (!it.value().is_string()) {
      throw ConfigError("config key '" + parent.Key(key) + "." + it.key() + "' must be a path");
    }
    out[it.key()] = Resolve(base, it.value().get<std::string>());
  }
}

}  // namespace

RunConfig ParseConfig(const json& doc, const std::string& base_dir) {
  RunConfig cfg;
  Section root(doc, "");

  if (root.Has("model")) {
    Section model(root.Child("model"), "model");
    if (model.Has("areas")) {
      const json& list = model.Child("areas");
      if (!list.is_array() || list.empty()) {
        throw ConfigError("config key 'model.areas' must be a non-empty array");
      }
      cfg.areas.clear();
      for (size_t i = 0; i < list.size(); ++i) {
        AreaParams a;
        ReadArea(list[i], "model.areas[" + std::to_string(i) + "]", a);
        cfg.areas.push_back(a);
      }
      cfg.ties = DefaultChainTies(static_cast<int>(cfg.areas.size()));
    }
    if (model.Has("ties")) {
      const json& list = model.Child("ties");
      if (!list.is_array()) throw ConfigError("config key 'model.ties' must be an array");
      cfg.ties.clear();
      for (size_t i = 0; i < list.size(); ++i) {
        Section t(list[i], "model.ties[" + std::to_string(i) + "]");
        TieParams tie;
        t.Read("from", tie.from);
        t.Read("to", tie.to);
        t.Read("t", tie.t);
        t.Finish();
        cfg.ties.push_back(tie);
      }
    }
    model.Read("integral_augmentation", cfg.integral_augmentation);
    model.Finish();
  }

  if (root.Has("decomposition")) {
    Section dec(root.Child("decomposition"), "decomposition");
    std::string m_file;
    dec.Read("complementary_file", m_file);
    if (!m_file.empty()) cfg.complementary_file = Resolve(base_dir, m_file);
    dec.Finish();
  }

  if (root.Has("discretize")) {
    Section d(root.Child("discretize"), "discretize");
    d.Read("ts", cfg.design.ts);
    d.Finish();
  }

  if (root.Has("synthesis")) {
    Section s(root.Child("synthesis"), "synthesis");
    std::string policy = ToString(cfg.design.policy);
    s.Read("window_policy", policy);
    try {
      cfg.design.policy = WindowPolicyFromString(policy);
    } catch (const ValidationError& e) {
      throw ConfigError("config key 'synthesis.window_policy': " + std::string(e.what()));
    }
    s.Read("uniform_n", cfg.design.uniform_n);
    if (s.Has("weights")) {
      Section w(s.Child("weights"), "synthesis.weights");
      DesignWeights& dw = cfg.design.weights;
      w.Read("q_s", dw.q_state);
      w.Read("q_ace", dw.q_ace);
      w.Read("h_s", dw.h);
      if (w.Has("q_integral")) {
        double qi = 0.0;
        w.Read("q_integral", qi);
        dw.q_integral = qi;
      }
      ReadFileMap(w, "q_s_files", cfg.q_s_files, base_dir);
      ReadFileMap(w, "h_s_files", cfg.h_s_files, base_dir);
      w.Finish();
    }
    s.Finish();
  }

  if (root.Has("dp")) {
    Section d(root.Child("dp"), "dp");
    d.Read("tolerance", cfg.dp.tolerance);
    d.Read("max_iterations", cfg.dp.max_iterations);
    d.Finish();
  }

  if (root.Has("ep")) {
    Section e(root.Child("ep"), "ep");
    e.Read("population_size", cfg.ep.population_size);
    e.Read("generations", cfg.ep.generations);
    e.Read("f_min", cfg.ep.f_min);
    e.Read("f_max", cfg.ep.f_max);
    e.Read("tournament_q", cfg.ep.tournament_q);
    e.Read("mutation_scale", cfg.ep.mutation_scale);
    e.Read("mutation_floor", cfg.ep.mutation_floor);
    e.Read("penalty", cfg.ep.penalty);
    e.Read("threads", cfg.ep.threads);
    e.Finish();
  }

  if (root.Has("sim")) {
    Section s(root.Child("sim"), "sim");
    ScenarioOptions& o = cfg.scenario;
    s.Read("duration", o.duration);
    s.Read("step_time", o.step_time);
    s.Read("step_size", o.step_size);
    s.Read("param_factor", o.param_factor);
    s.Read("ramp_start", o.ramp_start);
    s.Read("ramp_end", o.ramp_end);
    s.Read("step_back_time", o.step_back_time);
    s.Read("band_fraction", cfg.band_fraction);
    s.Finish();
  }

  root.Read("seed", cfg.seed);
  root.Read("output_dir", cfg.output_dir);
  root.Finish();

  cfg.scenario.ts = cfg.design.ts;
  cfg.ep.rng_seed = cfg.seed;

  // Range checks that belong to the modules, surfaced as config errors.
  try {
    for (const AreaParams& a : cfg.areas) ValidateAreaParams(a);
    if (cfg.dp.max_iterations < 1 || !(cfg.dp.tolerance > 0.0)) {
      throw ValidationError("dp: tolerance must be > 0 and max_iterations >= 1");
    }
    cfg.ep.Validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  if (!(cfg.design.ts > 0.0)) throw ConfigError("config key 'discretize.ts' must be > 0");
  if (!(cfg.scenario.duration > 0.0)) throw ConfigError("config key 'sim.duration' must be > 0");
  if (!(cfg.scenario.param_factor > 0.0)) {
    throw ConfigError("config key 'sim.param_factor' must be > 0");
  }
  if (!(cfg.band_fraction > 0.0)) throw ConfigError("config key 'sim.band_fraction' must be > 0");
  if (cfg.design.uniform_n < 1) throw ConfigError("config key 'synthesis.uniform_n' must be >= 1");
  return cfg;
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  const std::string base = std::filesystem::path(path).parent_path().string();
  return ParseConfig(doc, base.empty() ? "." : base);
}

json ToJson(const RunConfig& c) {
  json areas = json::array();
  for (const AreaParams& a : c.areas) {
    areas.push_back({{"kind", ToString(a.kind)}, {"tp", a.tp}, {"kp", a.kp},
                     {"tg", a.tg}, {"tt", a.tt}, {"tr", a.tr}, {"kr", a.kr},
                     {"tw", a.tw}, {"t_reset", a.t_reset}, {"t_comp", a.t_comp},
                     {"r", a.r}, {"b", a.b}});
  }
  json ties = json::array();
  for (const TieParams& t : c.ties) ties.push_back({{"from", t.from}, {"to", t.to}, {"t", t.t}});

  json weights = {{"q_s", c.design.weights.q_state},
                  {"q_ace", c.design.weights.q_ace},
                  {"h_s", c.design.weights.h},
                  {"q_s_files", c.q_s_files},
                  {"h_s_files", c.h_s_files}};
  if (c.design.weights.q_integral) weights["q_integral"] = *c.design.weights.q_integral;

  const ScenarioOptions& o = c.scenario;
  return {
      {"model", {{"areas", areas}, {"ties", ties},
                 {"integral_augmentation", c.integral_augmentation}}},
      {"decomposition", {{"complementary_file", c.complementary_file.value_or("")}}},
      {"discretize", {{"ts", c.design.ts}}},
      {"synthesis", {{"window_policy", ToString(c.design.policy)},
                     {"uniform_n", c.design.uniform_n},
                     {"weights", weights}}},
      {"dp", {{"tolerance", c.dp.tolerance}, {"max_iterations", c.dp.max_iterations}}},
      {"ep", {{"population_size", c.ep.population_size},
              {"generations", c.ep.generations},
              {"f_min", c.ep.f_min},
              {"f_max", c.ep.f_max},
              {"tournament_q", c.ep.tournament_q},
              {"mutation_scale", c.ep.mutation_scale},
              {"mutation_floor", c.ep.mutation_floor},
              {"penalty", c.ep.penalty},
              {"threads", c.ep.threads}}},
      {"sim", {{"duration", o.duration}, {"step_time", o.step_time},
               {"step_size", o.step_size}, {"param_factor", o.param_factor},
               {"ramp_start", o.ramp_start}, {"ramp_end", o.ramp_end},
               {"step_back_time", o.step_back_time},
               {"band_fraction", c.band_fraction}}},
      {"seed", c.seed},
      {"output_dir", c.output_dir},
  };
}

std::string ConfigHash(const RunConfig& config) {
  // Thread count cannot change results, so it stays out of the hash.
  json doc = ToJson(config);
  doc["ep"].erase("threads");
  doc.erase("output_dir");
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LfcSystem BuildSystemFromConfig(const RunConfig& config) {
  return BuildSystem(config.areas, config.ties, config.integral_augmentation);
}

MatrixXd ReadMatrixFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream is(line);
    std::vector<double> row;
    std::string tok;
    while (is >> tok) {
      size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) {
        throw ValidationError("matrix file '" + path + "': bad number '" + tok + "'");
      }
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("matrix file '" + path + "' is empty");
  MatrixXd m(rows.size(), rows.front().size());
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) {
      throw ValidationError("matrix file '" + path + "': ragged rows");
    }
    for (size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

void LoadMatrixFiles(RunConfig& config) {
  if (config.complementary_file) {
    config.design.complementary = ReadMatrixFile(*config.complementary_file);
  }
  for (const auto& [label, path] : config.q_s_files) {
    config.design.q_s_override[label] = ReadMatrixFile(path);
  }
  for (const auto& [label, path] : config.h_s_files) {
    config.design.h_s_override[label] = ReadMatrixFile(path);
  }
}

}  // namespace lfc
