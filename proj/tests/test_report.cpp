#include <catch_amalgamated.hpp>

#include <json.hpp>
#include <sstream>

#include "mrivw/error.hpp"
#include "mrivw/format.hpp"
#include "mrivw/report.hpp"

using namespace mrivw;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

const SummaryDataset& table() { return bundled_menopause_dataset(); }

std::string rendered(const AnalysisReport& r, OutputFormat f) {
  std::ostringstream out;
  render(out, r, f);
  return out.str();
}

std::string rendered(const SensitivityReport& r, OutputFormat f) {
  std::ostringstream out;
  render(out, r, f);
  return out.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace

TEST_CASE("analysis report rows and table output") {
  const auto report = cmd_analyze(table());
  REQUIRE(report.rows.size() == 6);
  REQUIRE(report.variants.size() == 47);
  CHECK(report.rows[0].label() == "Fixed, second-order");
  CHECK(report.rows[5].label() == "Multiplicative RE, first-order");

  const auto text = rendered(report, OutputFormat::Table);
  CHECK_THAT(text, ContainsSubstring("0.0021    0.0037     (-0.0052, 0.0095)"));
  CHECK_THAT(text, ContainsSubstring("2.826"));
  CHECK_THAT(text, ContainsSubstring("1.686"));
  CHECK_THAT(text, ContainsSubstring("(-0.0110, 0.0317)"));
}

TEST_CASE("csv and json carry identical values") {
  const auto report = cmd_analyze(table());
  const auto rows = csv_rows(rendered(report, OutputFormat::Csv));
  const auto j = nlohmann::json::parse(rendered(report, OutputFormat::Json));
  REQUIRE(rows.size() == 7);
  REQUIRE(j["results"].size() == 6);
  CHECK(j["label"] == "menopause_triglycerides");
  CHECK(j["variants"].size() == 47);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& r = *report.rows[i].result;
    const auto& c = rows[i + 1];
    const auto& jr = j["results"][i];
    CHECK(c[0] == jr["model"].get<std::string>());
    CHECK(c[1] == jr["weights"].get<std::string>());
    double parsed = 0;
    REQUIRE(fmt::parse_double(c[2], parsed));
    CHECK(parsed == r.estimate);
    CHECK(jr["estimate"].get<double>() == r.estimate);
    REQUIRE(fmt::parse_double(c[3], parsed));
    CHECK(parsed == jr["se"].get<double>());
    REQUIRE(fmt::parse_double(c[4], parsed));
    CHECK(parsed == jr["ci_lower"].get<double>());
    REQUIRE(fmt::parse_double(c[6], parsed));
    CHECK(parsed == jr["heterogeneity"].get<double>());
    REQUIRE(fmt::parse_double(c[8], parsed));
    CHECK(parsed == jr["p_value"].get<double>());
  }
}

TEST_CASE("single-variant dataset gives fixed-effect rows only") {
  const SummaryDataset one({table()[0]}, "one");
  const auto report = cmd_analyze(one);
  REQUIRE(report.rows.size() == 6);
  for (const auto& row : report.rows) {
    if (row.model == PoolingModel::Fixed) {
      CHECK(row.result);
    } else {
      CHECK_FALSE(row.result);
      CHECK(row.note == "insufficient variants");
    }
  }
  CHECK_THAT(rendered(report, OutputFormat::Table), ContainsSubstring("insufficient variants"));
  const auto j = nlohmann::json::parse(rendered(report, OutputFormat::Json));
  CHECK(j["results"][2]["note"] == "insufficient variants");
}

TEST_CASE("leave-one-out") {
  const auto report = cmd_leave_one_out(table(), "rs704795");
  CHECK(report.variants.size() == 46);
  CHECK_THAT(report.rows[0].result->estimate, WithinAbs(0.0000, 0.0005));
  CHECK_THAT(report.rows[1].result->estimate, WithinAbs(-0.0001, 0.0005));
  const auto text = rendered(report, OutputFormat::Table);
  CHECK_THAT(text, ContainsSubstring("-0.0001"));
  CHECK_THROWS_AS(cmd_leave_one_out(table(), "rs0"), input_error);

  // removing a variant then appending it again reproduces the full analysis
  auto vs = table().without("rs10734411").variants();
  vs.insert(vs.begin(), table()[0]);
  const auto again = cmd_analyze(SummaryDataset(vs, table().label()));
  CHECK(rendered(again, OutputFormat::Csv) == rendered(cmd_analyze(table()), OutputFormat::Csv));
}

TEST_CASE("theta sensitivity") {
  const std::vector<double> grid(kDefaultThetas.begin(), kDefaultThetas.end());
  const auto report = cmd_sensitivity(table(), {0.3, 0.0, -0.2, 0.1, -0.1, 0.2, 0.0});
  REQUIRE(report.rows.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(report.rows[i].theta == grid[i]);
  CHECK_FALSE(report.has_errors());

  const auto& zero = report.rows[2];
  const auto analysis = cmd_analyze(table());
  for (std::size_t m = 0; m < 3; ++m) {
    CHECK(zero.results[m]->estimate == analysis.rows[2 * m].result->estimate);
    CHECK(zero.results[m]->se == analysis.rows[2 * m].result->se);
  }
  CHECK_THAT(zero.results[0]->ci_lower, WithinAbs(-0.005, 0.0015));
  CHECK_THAT(report.rows[5].results[2]->estimate, WithinAbs(0.005, 0.0015));
  CHECK_THAT(report.rows[5].results[2]->ci_upper, WithinAbs(0.018, 0.0015));

  const auto text = rendered(report, OutputFormat::Table);
  CHECK_THAT(text, ContainsSubstring("-0.005, 0.009"));
  const auto j = nlohmann::json::parse(rendered(report, OutputFormat::Json));
  CHECK(j["rows"].size() == 6);
  CHECK(j["rows"][0]["fixed"]["estimate"].get<double>() == report.rows[0].results[0]->estimate);
  CHECK(csv_rows(rendered(report, OutputFormat::Csv)).size() == 1 + 18);
}

TEST_CASE("sensitivity errors") {
  CHECK_THROWS_AS(cmd_sensitivity(table(), {0.0, 1.5}), input_error);
  CHECK_THROWS_AS(cmd_sensitivity(table(), {}), input_error);

  // theta = 1 with sy = |ratio| sx zeroes the first variant's variance
  std::vector<VariantAssociation> vs{{"edge", "", "", "", 1.0, 0.5, 1.0, 0.5},
                                     {"fine", "", "", "", 0.2, 0.01, 0.01, 0.01}};
  const auto report = cmd_sensitivity(SummaryDataset(vs, "edge"), {0.0, 1.0});
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].error.empty());
  CHECK(report.has_errors());
  CHECK_THAT(report.rows[1].error, ContainsSubstring("theta=1"));
  CHECK_THAT(report.rows[1].error, ContainsSubstring("edge"));
  CHECK_THAT(rendered(report, OutputFormat::Table), ContainsSubstring("theta=1"));
}

TEST_CASE("format parsing and locale-independent numbers") {
  CHECK(parse_output_format("json") == OutputFormat::Json);
  CHECK_THROWS_AS(parse_output_format("xml"), input_error);
  CHECK(fmt::fixed(-0.00001, 4) == "0.0000");
  CHECK(fmt::fixed(0.35, 1) == "0.3");
  CHECK(fmt::fixed(-1.25, 3) == "-1.250");
  CHECK(fmt::shortest(0.1) == "0.1");
  CHECK(fmt::shortest(1e-20) == "1e-20");
  double v = 0;
  CHECK(fmt::parse_double(" +2.5 ", v));
  CHECK(v == 2.5);
  CHECK_FALSE(fmt::parse_double("2,5", v));
}
