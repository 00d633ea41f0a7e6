#include <catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>

#include "mrivw/error.hpp"
#include "mrivw/regression.hpp"
#include "mrivw/summary_data.hpp"
#include "mrivw/ratio_estimates.hpp"
#include "support/tsls_equivalence.hpp"

using namespace mrivw;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  Eigen::VectorXd v(n);
  for (auto& e : v) e = normal(rng);
  return v;
}

}  // namespace

TEST_CASE("simple_ols agrees with the normal equations") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 10 + trial * 7;
    const Eigen::VectorXd x = random_vector(rng, n, 2.0).array() + 1.5;
    const Eigen::VectorXd y = 0.7 * x + random_vector(rng, n) + Eigen::VectorXd::Constant(n, -3.0);

    Eigen::MatrixXd design(n, 2);
    design.col(0).setOnes();
    design.col(1) = x;
    const Eigen::MatrixXd xtx = design.transpose() * design;
    const Eigen::Vector2d coef = xtx.ldlt().solve(design.transpose() * y);
    const double sigma2 = (y - design * coef).squaredNorm() / static_cast<double>(n - 2);
    const double se = std::sqrt(sigma2 * xtx.inverse()(1, 1));

    const auto fit = simple_ols(y, x);
    REQUIRE_THAT(fit.slope, WithinRel(coef(1), 1e-10));
    REQUIRE_THAT(fit.intercept, WithinRel(coef(0), 1e-10));
    REQUIRE_THAT(fit.slope_se, WithinRel(se, 1e-10));
  }
}

TEST_CASE("simple_ols degenerate cases") {
  Eigen::VectorXd x(4);
  x << 1, 2, 3, 4;
  const Eigen::VectorXd y = 2.0 * x.array() + 1.0;
  const auto fit = simple_ols(y, x);
  CHECK_THAT(fit.slope, WithinRel(2.0, 1e-14));
  CHECK_THAT(fit.intercept, WithinRel(1.0, 1e-14));
  CHECK_THAT(fit.slope_se, WithinAbs(0.0, 1e-7));

  CHECK_THROWS_AS(simple_ols(y, Eigen::VectorXd::Zero(4)), numeric_error);
  CHECK_THROWS_AS(simple_ols(y, Eigen::VectorXd::Ones(3)), input_error);
  CHECK_THROWS_AS(simple_ols(y.head(2), x.head(2)), input_error);
}

TEST_CASE("weighted regression through the origin") {
  SECTION("exact proportionality") {
    Eigen::VectorXd x(5), w(5);
    x << 1, -2, 3, 0.5, 4;
    w << 1, 2, 3, 4, 5;
    const auto fit = weighted_no_intercept((1.7 * x).eval(), x, w);
    CHECK_THAT(fit.slope, WithinRel(1.7, 1e-14));
    CHECK_THAT(fit.residual_sigma, WithinAbs(0.0, 1e-14));
  }
  SECTION("weight scale changes sigma, not the slope or its reported error") {
    std::mt19937_64 rng(17);
    const Eigen::VectorXd x = random_vector(rng, 30);
    const Eigen::VectorXd y = 0.4 * x + random_vector(rng, 30, 0.3);
    const Eigen::VectorXd w = random_vector(rng, 30).array().abs() + 0.1;
    const auto a = weighted_no_intercept(y, x, w);
    const auto b = weighted_no_intercept(y, x, (9.0 * w).eval());
    CHECK_THAT(b.slope, WithinRel(a.slope, 1e-13));
    CHECK_THAT(b.residual_sigma, WithinRel(3.0 * a.residual_sigma, 1e-13));
    CHECK_THAT(b.slope_se_raw, WithinRel(a.slope_se_raw, 1e-13));
  }
  SECTION("published first- and second-order dispersion") {
    const auto& ds = bundled_menopause_dataset();
    const auto j = static_cast<Eigen::Index>(ds.size());
    Eigen::VectorXd y(j), x(j), w1(j), w2(j);
    for (Eigen::Index i = 0; i < j; ++i) {
      const auto& v = ds[static_cast<std::size_t>(i)];
      y(i) = v.beta_y;
      x(i) = v.beta_x;
      w1(i) = 1.0 / (v.se_y * v.se_y);
      w2(i) = 1.0 / (v.se_y * v.se_y + v.beta_y * v.beta_y * v.se_x * v.se_x / (v.beta_x * v.beta_x));
    }
    const auto first = weighted_no_intercept(y, x, w1);
    CHECK_THAT(first.slope, WithinAbs(0.0103, 0.0005));
    CHECK_THAT(first.residual_sigma, WithinAbs(2.826, 0.001));
    const auto second = weighted_no_intercept(y, x, w2);
    CHECK_THAT(second.slope, WithinAbs(0.0021, 0.0005));
    CHECK_THAT(second.residual_sigma, WithinAbs(1.686, 0.001));
  }
  SECTION("errors") {
    Eigen::VectorXd x(3), w(3);
    x << 1, 2, 3;
    w << 1, 0, 1;
    CHECK_THROWS_AS(weighted_no_intercept(x, x, w), input_error);
    CHECK_THROWS_AS(weighted_no_intercept(x, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(3)),
                    numeric_error);
    const auto single = weighted_no_intercept(x.head(1), x.head(1), Eigen::VectorXd::Ones(1));
    CHECK(single.residual_sigma == 0.0);
  }
}

TEST_CASE("two-stage least squares") {
  std::mt19937_64 rng(23);
  const Eigen::Index n = 200;
  const Eigen::VectorXd z = random_vector(rng, n);
  const Eigen::VectorXd x = 0.8 * z + random_vector(rng, n);
  const Eigen::VectorXd y = 0.3 * x + random_vector(rng, n);

  SECTION("one instrument is the ratio of cross-products") {
    CHECK_THAT(two_stage_least_squares(x, y, z), WithinRel(z.dot(y) / z.dot(x), 1e-12));
  }
  SECTION("instrumenting by the exposure itself is least squares") {
    CHECK_THAT(two_stage_least_squares(x, y, x), WithinRel(x.dot(y) / x.dot(x), 1e-12));
  }
  SECTION("singular instruments") {
    Eigen::MatrixXd zz(n, 2);
    zz.col(0) = z;
    zz.col(1) = 2.0 * z;
    CHECK_THROWS_AS(two_stage_least_squares(x, y, zz), numeric_error);
    CHECK_THROWS_AS(two_stage_least_squares(x, y.head(10), z), input_error);
  }
  SECTION("extended precision instantiation") {
    using VectorL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const VectorL zl = z.cast<long double>();
    const VectorL xl = x.cast<long double>();
    const VectorL yl = y.cast<long double>();
    const long double got = two_stage_least_squares(xl, yl, zl);
    CHECK(std::abs(static_cast<double>(got - zl.dot(yl) / zl.dot(xl))) < 1e-15);
    const auto fit = simple_ols(yl, xl);
    CHECK_THAT(static_cast<double>(fit.slope), WithinRel(simple_ols(y, x).slope, 1e-12));
  }
}

TEST_CASE("joint instrument strength") {
  std::mt19937_64 rng(29);
  const Eigen::Index n = 500;
  Eigen::MatrixXd z(n, 3);
  for (Eigen::Index j = 0; j < 3; ++j) z.col(j) = random_vector(rng, n);
  const Eigen::VectorXd x = z * Eigen::Vector3d(0.3, -0.2, 0.1) + random_vector(rng, n);

  Eigen::MatrixXd design(n, 4);
  design.col(0).setOnes();
  design.rightCols(3) = z;
  const Eigen::VectorXd coef = (design.transpose() * design).ldlt().solve(design.transpose() * x);
  const double rss = (x - design * coef).squaredNorm();
  const double tss = (x.array() - x.mean()).square().sum();
  const double r2 = 1.0 - rss / tss;
  const double f = ((tss - rss) / 3.0) / (rss / static_cast<double>(n - 4));

  const auto s = joint_f_and_r2(x, z);
  CHECK_THAT(s.r_squared, WithinRel(r2, 1e-10));
  CHECK_THAT(s.f_statistic, WithinRel(f, 1e-10));
}

TEST_CASE("2SLS equals IVW on orthogonalized instruments") {
  const auto config = testing::equivalence_config(5000);
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto data = testing::equivalence_data(config, rep);
    REQUIRE(testing::orthogonal_gap(data) < 1e-8);
  }
}

TEST_CASE("2SLS and IVW converge on raw genotypes as N grows") {
  const auto medians = testing::raw_gap_medians({1000, 5000, 20000}, 100);
  CAPTURE(medians);
  CHECK(medians[0] > medians[1]);
  CHECK(medians[1] > medians[2]);
}
