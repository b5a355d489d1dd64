#include "lfc/gain_io.h"

#include <cstdio>
#include <fstream>
#include <istream>
#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

namespace lfc {

namespace {

constexpr const char* kMagic = "lfc-gain 1";

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string JoinInts(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<int> ParseInts(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  std::vector<int> out;
  std::string tok;
  while (is >> tok) {
    size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) {
      throw ValidationError("gain file: bad integer '" + tok + "' in " + key);
    }
    out.push_back(v);
  }
  return out;
}

double ParseDouble(const std::string& tok) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty()) {
    throw ValidationError("gain file: bad number '" + tok + "'");
  }
  return v;
}

}  // namespace

void WriteGain(std::ostream& out, const GainFile& file) {
  const MatrixXd& f = file.gain.f;
  const MeasurementWindow& w = file.gain.window;
  out << "# " << kMagic << "\n";
  if (!file.version.empty()) out << "version " << file.version << "\n";
  if (!file.config_hash.empty()) out << "config_hash " << file.config_hash << "\n";
  if (!file.label.empty()) out << "label " << file.label << "\n";
  if (file.ts > 0.0) out << "ts " << Fmt(file.ts) << "\n";
  out << "provenance " << ToString(file.gain.provenance) << "\n";
  out << "rows " << f.rows() << "\n";
  out << "cols " << f.cols() << "\n";
  out << "window " << w.n_window << " " << w.p << " " << w.m << "\n";
  out << "measured " << JoinInts(file.measured_rows) << "\n";
  out << "controls " << JoinInts(file.control_columns) << "\n";
  out << "spectral_radius " << Fmt(file.gain.spectral_radius) << "\n";
  out << "data\n";
  for (Eigen::Index r = 0; r < f.rows(); ++r) {
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
      if (c) out << ' ';
      out << Fmt(f(r, c));
    }
    out << "\n";
  }
}

GainFile ReadGain(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != std::string("# ") + kMagic) {
    throw ValidationError("gain file: missing '# " + std::string(kMagic) + "' header");
  }
  std::map<std::string, std::string> fields;
  bool saw_data = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "data") {
      saw_data = true;
      break;
    }
    const auto space = line.find(' ');
    const std::string key = line.substr(0, space);
    const std::string value = space == std::string::npos ? "" : line.substr(space + 1);
    if (fields.count(key)) throw ValidationError("gain file: duplicate key " + key);
    fields[key] = value;
  }
  if (!saw_data) throw ValidationError("gain file: no data section");
  for (const char* key : {"provenance", "rows", "cols", "window", "measured",
                          "controls", "spectral_radius"}) {
    if (!fields.count(key)) {
      throw ValidationError(std::string("gain file: missing key ") + key);
    }
  }
  static const std::vector<std::string> known = {
      "version", "config_hash", "label", "ts", "provenance", "rows", "cols",
      "window", "measured", "controls", "spectral_radius"};
  for (const auto& [key, value] : fields) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError("gain file: unknown key " + key);
    }
  }

  GainFile file;
  if (fields.count("version")) file.version = fields["version"];
  if (fields.count("config_hash")) file.config_hash = fields["config_hash"];
  if (fields.count("label")) file.label = fields["label"];
  if (fields.count("ts")) {
    file.ts = ParseDouble(fields["ts"]);
    if (!(file.ts > 0.0)) throw ValidationError("gain file: ts must be > 0");
  }
  file.gain.provenance = ProvenanceFromString(fields["provenance"]);
  const std::vector<int> rows = ParseInts(fields["rows"], "rows");
  const std::vector<int> cols = ParseInts(fields["cols"], "cols");
  const std::vector<int> window = ParseInts(fields["window"], "window");
  if (rows.size() != 1 || cols.size() != 1 || rows[0] < 1 || cols[0] < 1) {
    throw ValidationError("gain file: rows/cols must be single positive integers");
  }
  if (window.size() != 3) throw ValidationError("gain file: window needs N p m");
  file.gain.window = {window[0], window[1], window[2]};
  if (file.gain.window.q() != cols[0] || file.gain.window.m != rows[0]) {
    throw ValidationError("gain file: window (N p m) does not match gain shape");
  }
  file.measured_rows = ParseInts(fields["measured"], "measured");
  file.control_columns = ParseInts(fields["controls"], "controls");
  if (static_cast<int>(file.measured_rows.size()) != file.gain.window.p ||
      static_cast<int>(file.control_columns.size()) != file.gain.window.m) {
    throw ValidationError("gain file: measured/controls do not match window p/m");
  }
  file.gain.spectral_radius = ParseDouble(fields["spectral_radius"]);

  file.gain.f.resize(rows[0], cols[0]);
  for (int r = 0; r < rows[0]; ++r) {
    if (!std::getline(in, line)) throw ValidationError("gain file: truncated data");
    std::istringstream is(line);
    std::string tok;
    int c = 0;
    while (is >> tok) {
      if (c >= cols[0]) throw ValidationError("gain file: too many columns in data");
      file.gain.f(r, c++) = ParseDouble(tok);
    }
    if (c != cols[0]) throw ValidationError("gain file: too few columns in data");
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw ValidationError("gain file: trailing content after data");
    }
  }
  if (!AllFinite(file.gain.f)) throw ValidationError("gain file: non-finite entries");
  return file;
}

void WriteGainFile(const std::string& path, const GainFile& file) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  WriteGain(out, file);
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

GainFile ReadGainFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open gain file '" + path + "'");
  return ReadGain(in);
}

}  // namespace lfc
