#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mrivw/meta_engine.hpp"
#include "mrivw/summary_data.hpp"

namespace mrivw {

/// "bundled" selects the embedded menopause dataset, anything else is a CSV
/// path.
SummaryDataset resolve_input(const std::string& input, std::vector<std::string>* warnings = nullptr);

struct MethodRow {
  PoolingModel model = PoolingModel::Fixed;
  WeightRule rule;
  std::optional<IvwResult> result;
  std::string note;  // why `result` is empty

  /// e.g. "Fixed, second-order", "Multiplicative RE, first-order".
  std::string label() const;
};

struct VariantRow {
  std::string id;
  double ratio = 0.0;
  double se_first = 0.0;
  double se_second = 0.0;
  double weight_first = 0.0;   // 1 / first-order variance
  double weight_second = 0.0;  // 1 / second-order variance
};

struct AnalysisReport {
  std::string label;
  std::vector<VariantRow> variants;
  std::vector<MethodRow> rows;  // six rows, fixed/additive/multiplicative x second/first
};

AnalysisReport cmd_analyze(const SummaryDataset& dataset);
AnalysisReport cmd_leave_one_out(const SummaryDataset& dataset, const std::string& variant_id);

/// Per-variant table: ratio estimate, first- and second-order standard
/// errors and weights.
std::vector<VariantRow> variant_table(const SummaryDataset& dataset);

inline constexpr std::array<double, 6> kDefaultThetas{-0.2, -0.1, 0.0, 0.1, 0.2, 0.3};
inline constexpr std::array<PoolingModel, 3> kAllModels{
    PoolingModel::Fixed, PoolingModel::AdditiveRandom, PoolingModel::MultiplicativeRandom};

struct SensitivityRow {
  double theta = 0.0;
  std::vector<std::optional<IvwResult>> results;  // parallel to SensitivityReport::models
  std::string error;                              // set when theta is invalid for some variant
};

struct SensitivityReport {
  std::string label;
  std::vector<PoolingModel> models;
  std::vector<SensitivityRow> rows;  // theta strictly increasing

  bool has_errors() const;
};

/// Second-order weights with correlation theta, pooled under each model.
/// Thetas are sorted and deduplicated; |theta| > 1 is an input_error.
SensitivityReport cmd_sensitivity(const SummaryDataset& dataset, std::vector<double> thetas,
                                  std::vector<PoolingModel> models = {kAllModels.begin(),
                                                                      kAllModels.end()});

enum class OutputFormat { Table, Csv, Json };

OutputFormat parse_output_format(const std::string& name);

void render(std::ostream& out, const AnalysisReport& report, OutputFormat format);
void render(std::ostream& out, const SensitivityReport& report, OutputFormat format);

}  // namespace mrivw
