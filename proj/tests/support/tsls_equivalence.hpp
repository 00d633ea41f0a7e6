#pragma once

// Two-stage least squares against the summarized-data IVW estimate on
// simulated one-sample data.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mrivw/meta_engine.hpp"
#include "mrivw/regression.hpp"
#include "mrivw/simulator.hpp"

namespace mrivw::testing {

inline ScenarioConfig equivalence_config(int n_per_sample) {
  ScenarioConfig c;
  c.scenario = Scenario::S1;
  c.alpha = 0.10;
  c.beta_x = 0.2;
  c.beta_u = 1.0;
  c.n_per_sample = n_per_sample;
  c.seed = 2015;
  return c;
}

inline IndividualData equivalence_data(const ScenarioConfig& config, std::uint64_t rep) {
  for (std::uint32_t attempt = 0;; ++attempt) {
    auto d = generate_individual_data(config, rep, attempt);
    if (!has_monomorphic_variant(d)) return d;
  }
}

inline Eigen::VectorXd centered(const Eigen::VectorXd& v) {
  return (v.array() - v.mean()).matrix();
}

/// Instruments replaced by an orthonormal basis of the centered genotype
/// columns; summary statistics built from univariate projections with a common
/// residual scale. Returns |2SLS - IVW first-order fixed|.
inline double orthogonal_gap(const IndividualData& d) {
  const Eigen::MatrixXd g = d.genotypes.rowwise() - d.genotypes.colwise().mean();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd z = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
  const Eigen::VectorXd x = centered(d.x);
  const Eigen::VectorXd y = centered(d.y);

  const double sigma = 1.0;
  std::vector<VariantAssociation> vs;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const double zz = z.col(j).squaredNorm();
    VariantAssociation v;
    v.id = "z" + std::to_string(j + 1);
    v.beta_x = z.col(j).dot(x) / zz;
    v.beta_y = z.col(j).dot(y) / zz;
    v.se_x = sigma / std::sqrt(zz);
    v.se_y = sigma / std::sqrt(zz);
    vs.push_back(v);
  }
  const double ivw = analyze(SummaryDataset(vs, "orthogonal"), WeightRule::first_order(),
                             PoolingModel::Fixed)
                         .estimate;
  const double tsls = two_stage_least_squares(x, y, z);
  return std::abs(tsls - ivw);
}

/// Raw genotypes: IVW from per-variant regressions with intercept against
/// 2SLS on centered data.
inline double raw_gap(const IndividualData& d) {
  const double ivw =
      analyze(summarize(d), WeightRule::first_order(), PoolingModel::Fixed).estimate;
  const Eigen::MatrixXd g = d.genotypes.rowwise() - d.genotypes.colwise().mean();
  const double tsls = two_stage_least_squares(centered(d.x), centered(d.y), g);
  return std::abs(tsls - ivw);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Median raw gap over `reps` replications at each sample size.
inline std::vector<double> raw_gap_medians(const std::vector<int>& sizes, int reps) {
  std::vector<double> out;
  for (int n : sizes) {
    const auto config = equivalence_config(n);
    std::vector<double> gaps;
    for (int r = 0; r < reps; ++r) gaps.push_back(raw_gap(equivalence_data(config, r)));
    out.push_back(median(gaps));
  }
  return out;
}

}  // namespace mrivw::testing
