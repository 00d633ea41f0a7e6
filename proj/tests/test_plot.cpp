#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "mrivw/error.hpp"
#include "mrivw/plot.hpp"
#include "mrivw/report.hpp"

using namespace mrivw;
using Catch::Matchers::ContainsSubstring;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("scatter plot of the bundled dataset") {
  const auto svg = render_svg(association_scatter(bundled_menopause_dataset()));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK_THAT(svg, ContainsSubstring("viewBox=\"0 0 640 480\""));
  CHECK(count(svg, "<circle") == 47);
  CHECK(count(svg, "r=\"3\"") == 47);
  CHECK_THAT(svg, ContainsSubstring("Association with risk factor"));
  CHECK_THAT(svg, ContainsSubstring("Association with outcome"));
  CHECK_THAT(svg, ContainsSubstring("<title>rs704795</title>"));
  CHECK(svg == render_svg(association_scatter(bundled_menopause_dataset())));
}

TEST_CASE("points stay inside the plotting area") {
  const auto svg = render_svg(association_scatter(bundled_menopause_dataset()));
  const std::regex circle(R"re(cx="([-0-9.]+)" cy="([-0-9.]+)")re");
  int seen = 0;
  for (std::sregex_iterator it(svg.begin(), svg.end(), circle), end; it != end; ++it) {
    const double cx = std::stod((*it)[1]);
    const double cy = std::stod((*it)[2]);
    CHECK(cx >= 80.0);
    CHECK(cx <= 620.0);
    CHECK(cy >= 40.0);
    CHECK(cy <= 420.0);
    ++seen;
  }
  CHECK(seen == 47);
}

TEST_CASE("weights plot") {
  const auto spec = weights_scatter(bundled_menopause_dataset());
  REQUIRE(spec.points.size() == 47);
  CHECK(spec.identity_line);
  for (const auto& p : spec.points) CHECK(p.y <= p.x);

  const auto widest = std::max_element(spec.points.begin(), spec.points.end(),
                                       [](const auto& a, const auto& b) { return a.x - a.y < b.x - b.y; });
  CHECK(widest->label == "rs704795");

  const auto svg = render_svg(spec);
  CHECK(count(svg, "<circle") == 47);
  CHECK(count(svg, "class=\"identity\"") == 1);
}

TEST_CASE("plot command writes the file and reports failures") {
  const auto path = std::filesystem::temp_directory_path() / "mrivw_test_plot.svg";
  cmd_plot(bundled_menopause_dataset(), PlotKind::Weights, path);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == render_svg(weights_scatter(bundled_menopause_dataset())));
  std::filesystem::remove(path);

  CHECK_THROWS_AS(cmd_plot(bundled_menopause_dataset(), PlotKind::Scatter, "/nonexistent/dir/x.svg"),
                  input_error);
  CHECK_THROWS_AS(parse_plot_kind("histogram"), input_error);
  CHECK_THROWS_AS(render_svg(ScatterSpec{}), input_error);
}

TEST_CASE("single point and text escaping") {
  ScatterSpec spec;
  spec.title = "a<b & c";
  spec.points = {{1.0, 1.0, "x\"y"}};
  const auto svg = render_svg(spec);
  CHECK_THAT(svg, ContainsSubstring("a&lt;b &amp; c"));
  CHECK_THAT(svg, ContainsSubstring("x&quot;y"));
  CHECK(count(svg, "<circle") == 1);
}
