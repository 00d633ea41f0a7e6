#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mrivw/summary_data.hpp"

namespace mrivw {

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  std::string label;  // emitted as the point's <title>
};

struct ScatterSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ScatterPoint> points;
  bool identity_line = false;  // dashed y = x reference
};

/// Standalone SVG with a 640x480 viewBox, linear axes over padded data
/// bounds and one 3-pixel circle per point. Output is a pure function of
/// the spec.
std::string render_svg(const ScatterSpec& spec);

/// Outcome associations against risk-factor associations.
ScatterSpec association_scatter(const SummaryDataset& dataset);

/// Second-order weight against first-order weight for each variant.
ScatterSpec weights_scatter(const SummaryDataset& dataset);

enum class PlotKind { Scatter, Weights };

PlotKind parse_plot_kind(const std::string& name);

/// Builds the requested plot and writes it to `output`; input_error when the
/// file cannot be written.
void cmd_plot(const SummaryDataset& dataset, PlotKind kind, const std::filesystem::path& output);

}  // namespace mrivw
