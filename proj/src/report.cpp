#include "mrivw/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "mrivw/error.hpp"
#include "mrivw/format.hpp"

namespace mrivw {

namespace {

std::string model_title(PoolingModel model) {
  switch (model) {
    case PoolingModel::Fixed:
      return "Fixed";
    case PoolingModel::AdditiveRandom:
      return "Additive RE";
    case PoolingModel::MultiplicativeRandom:
      return "Multiplicative RE";
  }
  return "?";
}

std::string pad(std::string s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

nlohmann::json to_json(const IvwResult& r) {
  return {{"estimate", r.estimate},         {"se", r.se},
          {"ci_lower", r.ci_lower},         {"ci_upper", r.ci_upper},
          {"heterogeneity", r.heterogeneity}, {"q_statistic", r.q_statistic},
          {"p_value", r.p_value},           {"n_variants", r.n_variants}};
}

void render_table(std::ostream& out, const AnalysisReport& report) {
  out << "Dataset: " << report.label << " (" << report.variants.size() << " variants)\n";
  out << pad("Method", 32, true) << pad("Estimate", 10) << pad("SE", 10) << pad("95% CI", 22)
      << pad("Heterogeneity", 15) << pad("p", 8) << '\n';
  for (const auto& row : report.rows) {
    out << pad(row.label(), 32, true);
    if (!row.result) {
      out << "  " << row.note << '\n';
      continue;
    }
    const auto& r = *row.result;
    const std::string ci = "(" + fmt::fixed(r.ci_lower, 4) + ", " + fmt::fixed(r.ci_upper, 4) + ")";
    const std::string het = row.model == PoolingModel::Fixed ? "-" : fmt::fixed(r.heterogeneity, 3);
    out << pad(fmt::fixed(r.estimate, 4), 10) << pad(fmt::fixed(r.se, 4), 10) << pad(ci, 22)
        << pad(het, 15) << pad(fmt::fixed(r.p_value, 3), 8) << '\n';
  }
}

void render_csv(std::ostream& out, const AnalysisReport& report) {
  out << "model,weights,estimate,se,ci_lower,ci_upper,heterogeneity,q_statistic,p_value,"
         "n_variants,note\n";
  for (const auto& row : report.rows) {
    out << to_string(row.model) << ',' << to_string(row.rule) << ',';
    if (!row.result) {
      out << ",,,,,,,," << row.note << '\n';
      continue;
    }
    const auto& r = *row.result;
    out << fmt::shortest(r.estimate) << ',' << fmt::shortest(r.se) << ','
        << fmt::shortest(r.ci_lower) << ',' << fmt::shortest(r.ci_upper) << ','
        << fmt::shortest(r.heterogeneity) << ',' << fmt::shortest(r.q_statistic) << ','
        << fmt::shortest(r.p_value) << ',' << r.n_variants << ",\n";
  }
}

void render_json(std::ostream& out, const AnalysisReport& report) {
  nlohmann::json j;
  j["label"] = report.label;
  j["variants"] = nlohmann::json::array();
  for (const auto& v : report.variants) {
    j["variants"].push_back({{"id", v.id},
                             {"ratio", v.ratio},
                             {"se_first", v.se_first},
                             {"se_second", v.se_second},
                             {"weight_first", v.weight_first},
                             {"weight_second", v.weight_second}});
  }
  j["results"] = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r = row.result ? to_json(*row.result) : nlohmann::json{{"note", row.note}};
    r["model"] = to_string(row.model);
    r["weights"] = to_string(row.rule);
    j["results"].push_back(std::move(r));
  }
  out << j.dump(2) << '\n';
}

std::string theta_text(double theta) { return fmt::fixed(theta, 2); }

void render_table(std::ostream& out, const SensitivityReport& report) {
  out << "Dataset: " << report.label << " (second-order weights with correlation theta)\n";
  out << pad("theta", 7);
  for (auto m : report.models) out << pad(model_title(m), 19) << pad("95% CI", 18);
  out << '\n';
  for (const auto& row : report.rows) {
    out << pad(theta_text(row.theta), 7);
    if (!row.error.empty()) {
      out << "  " << row.error << '\n';
      continue;
    }
    for (const auto& r : row.results) {
      out << pad(fmt::fixed(r->estimate, 3), 19)
          << pad(fmt::fixed(r->ci_lower, 3) + ", " + fmt::fixed(r->ci_upper, 3), 18);
    }
    out << '\n';
  }
}

void render_csv(std::ostream& out, const SensitivityReport& report) {
  out << "theta,model,estimate,se,ci_lower,ci_upper,heterogeneity,error\n";
  for (const auto& row : report.rows) {
    for (std::size_t m = 0; m < report.models.size(); ++m) {
      out << fmt::shortest(row.theta) << ',' << to_string(report.models[m]) << ',';
      if (!row.error.empty()) {
        out << ",,,,,\"" << row.error << "\"\n";
        continue;
      }
      const auto& r = *row.results[m];
      out << fmt::shortest(r.estimate) << ',' << fmt::shortest(r.se) << ','
          << fmt::shortest(r.ci_lower) << ',' << fmt::shortest(r.ci_upper) << ','
          << fmt::shortest(r.heterogeneity) << ",\n";
    }
  }
}

void render_json(std::ostream& out, const SensitivityReport& report) {
  nlohmann::json j;
  j["label"] = report.label;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r{{"theta", row.theta}};
    if (!row.error.empty()) {
      r["error"] = row.error;
    } else {
      for (std::size_t m = 0; m < report.models.size(); ++m) {
        r[to_string(report.models[m])] = to_json(*row.results[m]);
      }
    }
    j["rows"].push_back(std::move(r));
  }
  out << j.dump(2) << '\n';
}

}  // namespace

SummaryDataset resolve_input(const std::string& input, std::vector<std::string>* warnings) {
  if (input == "bundled") return bundled_menopause_dataset();
  return load_dataset(input, warnings);
}

std::string MethodRow::label() const {
  return model_title(model) + ", " + to_string(rule);
}

std::vector<VariantRow> variant_table(const SummaryDataset& dataset) {
  std::vector<VariantRow> rows;
  rows.reserve(dataset.size());
  for (const auto& v : dataset) {
    const double v1 = variance_first_order(v);
    const double v2 = variance_second_order(v);
    rows.push_back({v.id, ratio_estimate(v), std::sqrt(v1), std::sqrt(v2), 1.0 / v1, 1.0 / v2});
  }
  return rows;
}

AnalysisReport cmd_analyze(const SummaryDataset& dataset) {
  if (dataset.empty()) throw input_error("empty dataset");
  AnalysisReport report;
  report.label = dataset.label();
  report.variants = variant_table(dataset);
  const std::array<WeightRule, 2> rules{WeightRule::second_order(), WeightRule::first_order()};
  for (auto model : kAllModels) {
    for (const auto& rule : rules) {
      MethodRow row;
      row.model = model;
      row.rule = rule;
      if (model != PoolingModel::Fixed && dataset.size() < 2) {
        row.note = "insufficient variants";
      } else {
        row.result = analyze(dataset, rule, model);
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

AnalysisReport cmd_leave_one_out(const SummaryDataset& dataset, const std::string& variant_id) {
  return cmd_analyze(dataset.without(variant_id));
}

bool SensitivityReport::has_errors() const {
  return std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.error.empty(); });
}

SensitivityReport cmd_sensitivity(const SummaryDataset& dataset, std::vector<double> thetas,
                                  std::vector<PoolingModel> models) {
  if (dataset.empty()) throw input_error("empty dataset");
  if (thetas.empty()) throw input_error("no theta values given");
  if (models.empty()) throw input_error("no pooling models given");
  for (double t : thetas) WeightRule::second_order_correlated(t);
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());

  SensitivityReport report;
  report.label = dataset.label();
  report.models = std::move(models);
  for (double t : thetas) {
    SensitivityRow row;
    row.theta = t;
    try {
      const auto estimates = ratio_estimates(dataset, WeightRule::second_order_correlated(t));
      for (auto m : report.models) {
        if (m != PoolingModel::Fixed && estimates.size() < 2) {
          throw input_error("insufficient variants for " + to_string(m) + " model");
        }
        row.results.emplace_back(pool(estimates, m));
      }
    } catch (const std::runtime_error& e) {
      row.results.clear();
      row.error = "theta=" + fmt::shortest(t) + ": " + e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

OutputFormat parse_output_format(const std::string& name) {
  if (name == "table") return OutputFormat::Table;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw input_error("unknown format '" + name + "' (expected table, csv or json)");
}

void render(std::ostream& out, const AnalysisReport& report, OutputFormat format) {
  switch (format) {
    case OutputFormat::Table:
      return render_table(out, report);
    case OutputFormat::Csv:
      return render_csv(out, report);
    case OutputFormat::Json:
      return render_json(out, report);
  }
}

void render(std::ostream& out, const SensitivityReport& report, OutputFormat format) {
  switch (format) {
    case OutputFormat::Table:
      return render_table(out, report);
    case OutputFormat::Csv:
      return render_csv(out, report);
    case OutputFormat::Json:
      return render_json(out, report);
  }
}

}  // namespace mrivw
