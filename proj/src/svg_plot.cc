#include "lfc/svg_plot.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lfc {

namespace {

std::string Num(double v, const char* fmt = "%.6g") {
  char buf[32];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round-number tick spacing covering [lo, hi] with about `target` ticks.
double TickStep(double lo, double hi, int target) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 5.0}) {
    if (f * mag >= raw) return f * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string RenderLinePlot(const LinePlot& plot, const VectorXd& x,
                           const VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("plot: need matching x/y with at least two points");
  }
  if (!AllFinite(x) || !AllFinite(y)) throw ValidationError("plot: non-finite data");

  const double left = 80, right = 20, top = 40, bottom = 50;
  const double pw = plot.width - left - right;
  const double ph = plot.height - top - bottom;

  double x0 = x.minCoeff(), x1 = x.maxCoeff();
  double y0 = y.minCoeff(), y1 = y.maxCoeff();
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 - y0 <= 1e-300) {
    const double pad = y0 == 0.0 ? 1.0 : 0.1 * std::abs(y0);
    y0 -= pad;
    y1 += pad;
  } else {
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
  }
  const auto sx = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  const auto sy = [&](double v) { return top + (y1 - v) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!plot.comment.empty()) os << "<!-- " << Escape(plot.comment) << " -->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width
     << "\" height=\"" << plot.height << "\" viewBox=\"0 0 " << plot.width << ' '
     << plot.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << Num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
     << "font-size=\"14\">" << Escape(plot.title) << "</text>\n";

  os << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  const double xs = TickStep(x0, x1, 8);
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    os << "<line x1=\"" << Num(sx(t)) << "\" y1=\"" << Num(top) << "\" x2=\""
       << Num(sx(t)) << "\" y2=\"" << Num(top + ph) << "\"/>\n";
  }
  const double ys = TickStep(y0, y1, 6);
  for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
    os << "<line x1=\"" << Num(left) << "\" y1=\"" << Num(sy(t)) << "\" x2=\""
       << Num(left + pw) << "\" y2=\"" << Num(sy(t)) << "\"/>\n";
  }
  os << "</g>\n";

  os << "<g text-anchor=\"middle\">\n";
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    os << "<text x=\"" << Num(sx(t)) << "\" y=\"" << Num(top + ph + 16) << "\">"
       << Num(std::abs(t) < 1e-12 * xs ? 0.0 : t, "%.4g") << "</text>\n";
  }
  os << "</g>\n<g text-anchor=\"end\">\n";
  for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
    os << "<text x=\"" << Num(left - 6) << "\" y=\"" << Num(sy(t) + 4) << "\">"
       << Num(std::abs(t) < 1e-12 * ys ? 0.0 : t, "%.4g") << "</text>\n";
  }
  os << "</g>\n";

  os << "<rect x=\"" << Num(left) << "\" y=\"" << Num(top) << "\" width=\"" << Num(pw)
     << "\" height=\"" << Num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" points=\"";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) os << ' ';
    os << Num(sx(x(i))) << ',' << Num(sy(y(i)));
  }
  os << "\"/>\n";
  os << "<text x=\"" << Num(left + pw / 2) << "\" y=\"" << Num(plot.height - 12)
     << "\" text-anchor=\"middle\">" << Escape(plot.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << Num(top + ph / 2) << "\" text-anchor=\"middle\" "
     << "transform=\"rotate(-90 16 " << Num(top + ph / 2) << ")\">"
     << Escape(plot.y_label) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

void WriteLinePlot(const std::string& path, const LinePlot& plot,
                   const VectorXd& x, const VectorXd& y) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << RenderLinePlot(plot, x, y);
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

}  // namespace lfc
