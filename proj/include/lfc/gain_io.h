#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lfc/ofc.h"

namespace lfc {

/// A synthesized gain plus the wiring needed to use it: which output rows
/// of the full plant it reads and which input columns it drives.
struct GainFile {
  GainMatrix gain;
  std::string label;  // e.g. "central" or "area2"
  std::vector<int> measured_rows;
  std::vector<int> control_columns;
  std::string config_hash;
  std::string version;
  double ts = 0.0;  // design sample time; 0 when unknown
};

/// Plain-text format, one `key value…` per line, then `data` followed by
/// the gain rows at full precision (%.17g), so a write/read round trip is
/// bit-exact.
void WriteGain(std::ostream& out, const GainFile& file);
GainFile ReadGain(std::istream& in);

void WriteGainFile(const std::string& path, const GainFile& file);
GainFile ReadGainFile(const std::string& path);

}  // namespace lfc
