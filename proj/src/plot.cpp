#include "mrivw/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mrivw/error.hpp"
#include "mrivw/format.hpp"
#include "mrivw/report.hpp"

namespace mrivw {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr int kTicks = 5;

struct Range {
  double lo;
  double hi;
};

Range padded(double lo, double hi) {
  if (lo == hi) {
    const double half = lo == 0.0 ? 1.0 : std::abs(lo) * 0.5;
    return {lo - half, hi + half};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::string escape(const std::string& s) {
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

std::string px(double v) { return fmt::fixed(v, 2); }

// Enough decimals to tell neighbouring ticks apart.
int tick_decimals(const Range& r) {
  const double step = (r.hi - r.lo) / (kTicks - 1);
  if (!(step > 0.0)) return 2;
  return std::clamp(static_cast<int>(std::ceil(-std::log10(step))) + 1, 0, 8);
}

}  // namespace

std::string render_svg(const ScatterSpec& spec) {
  if (spec.points.empty()) throw input_error("nothing to plot: no variants");

  double xlo = spec.points.front().x, xhi = xlo, ylo = spec.points.front().y, yhi = ylo;
  for (const auto& p : spec.points) {
    xlo = std::min(xlo, p.x);
    xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  if (spec.identity_line) {
    xlo = ylo = std::min(xlo, ylo);
    xhi = yhi = std::max(xhi, yhi);
  }
  const Range xr = padded(xlo, xhi);
  const Range yr = padded(ylo, yhi);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto sy = [&](double y) { return kTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 480\" width=\"640\" "
       "height=\"480\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
  o << "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
    << "</text>\n";

  // axes
  const double x0 = kLeft, x1 = kLeft + plot_w, y0 = kTop + plot_h, y1 = kTop;
  o << "<g stroke=\"black\" stroke-width=\"1\">\n";
  o << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(x1) << "\" y2=\""
    << px(y0) << "\"/>\n";
  o << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(x0) << "\" y2=\""
    << px(y1) << "\"/>\n";
  o << "</g>\n";

  const int xd = tick_decimals(xr);
  const int yd = tick_decimals(yr);
  o << "<g class=\"ticks\">\n";
  for (int t = 0; t < kTicks; ++t) {
    const double xv = xr.lo + (xr.hi - xr.lo) * t / (kTicks - 1);
    const double yv = yr.lo + (yr.hi - yr.lo) * t / (kTicks - 1);
    o << "<line x1=\"" << px(sx(xv)) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(sx(xv))
      << "\" y2=\"" << px(y0 + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << px(sx(xv)) << "\" y=\"" << px(y0 + 18)
      << "\" text-anchor=\"middle\">" << fmt::fixed(xv, xd) << "</text>\n";
    o << "<line x1=\"" << px(x0 - 5) << "\" y1=\"" << px(sy(yv)) << "\" x2=\"" << px(x0)
      << "\" y2=\"" << px(sy(yv)) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << px(x0 - 8) << "\" y=\"" << px(sy(yv) + 4)
      << "\" text-anchor=\"end\">" << fmt::fixed(yv, yd) << "</text>\n";
  }
  o << "</g>\n";
  o << "<text x=\"" << px(kLeft + plot_w / 2) << "\" y=\"" << px(kHeight - 15)
    << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  o << "<text x=\"18\" y=\"" << px(kTop + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << px(kTop + plot_h / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

  if (spec.identity_line) {
    const double lo = std::max(xr.lo, yr.lo);
    const double hi = std::min(xr.hi, yr.hi);
    o << "<line class=\"identity\" x1=\"" << px(sx(lo)) << "\" y1=\"" << px(sy(lo)) << "\" x2=\""
      << px(sx(hi)) << "\" y2=\"" << px(sy(hi))
      << "\" stroke=\"grey\" stroke-dasharray=\"4 3\"/>\n";
  }

  o << "<g class=\"points\" fill=\"steelblue\" stroke=\"none\">\n";
  for (const auto& p : spec.points) {
    o << "<circle cx=\"" << px(sx(p.x)) << "\" cy=\"" << px(sy(p.y)) << "\" r=\"3\"><title>"
      << escape(p.label) << "</title></circle>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

ScatterSpec association_scatter(const SummaryDataset& dataset) {
  ScatterSpec spec;
  spec.title = "Genetic associations: " + dataset.label();
  spec.x_label = "Association with risk factor";
  spec.y_label = "Association with outcome";
  for (const auto& v : dataset) spec.points.push_back({v.beta_x, v.beta_y, v.id});
  return spec;
}

ScatterSpec weights_scatter(const SummaryDataset& dataset) {
  ScatterSpec spec;
  spec.title = "Second-order vs first-order weights: " + dataset.label();
  spec.x_label = "First-order weight";
  spec.y_label = "Second-order weight";
  spec.identity_line = true;
  for (const auto& row : variant_table(dataset)) {
    spec.points.push_back({row.weight_first, row.weight_second, row.id});
  }
  return spec;
}

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "scatter") return PlotKind::Scatter;
  if (name == "weights") return PlotKind::Weights;
  throw input_error("unknown plot kind '" + name + "' (expected scatter or weights)");
}

void cmd_plot(const SummaryDataset& dataset, PlotKind kind, const std::filesystem::path& output) {
  const auto svg = render_svg(kind == PlotKind::Scatter ? association_scatter(dataset)
                                                        : weights_scatter(dataset));
  std::ofstream out(output, std::ios::binary);
  if (!out) throw input_error("cannot write '" + output.string() + "'");
  out << svg;
  if (!out) throw input_error("failed writing '" + output.string() + "'");
}

}  // namespace mrivw
