#pragma once

#include <string>

#include "lfc/linalg.h"

namespace lfc {

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string comment;  // embedded as an XML comment after the prolog
  int width = 640;
  int height = 400;
};

/// Single-series line chart as a standalone SVG document.
std::string RenderLinePlot(const LinePlot& plot, const VectorXd& x,
                           const VectorXd& y);

void WriteLinePlot(const std::string& path, const LinePlot& plot,
                   const VectorXd& x, const VectorXd& y);

}  // namespace lfc
