#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrivw/meta_engine.hpp"
#include "mrivw/summary_data.hpp"

namespace mrivw {

/// Simulation scenarios. One-sample scenarios estimate both sets of
/// associations in the same individuals; two-sample scenarios use disjoint
/// halves of a doubled sample.
///
///   S1, S3  valid instruments (no direct effects)
///   S2, S4  balanced pleiotropy, beta_Z ~ N(0, 0.02^2)
///   S5      heavy-tailed pleiotropy, beta_Z = 0.02 * t_2 (one-sample)
///   S6, S7  (alpha_j, beta_Z) bivariate normal with correlation 0.4
enum class Scenario { S1 = 1, S2, S3, S4, S5, S6, S7 };

bool is_two_sample(Scenario s);
int scenario_number(Scenario s);
/// Throws input_error outside 1..7.
Scenario scenario_from_number(int n);

/// Causal effect and confounder effect pair, labelled as in the result
/// tables: a (0, +1), b (0, -1), c (0.2, +1), d (0.2, -1).
struct EffectSetting {
  char label = 'a';
  double beta_x = 0.0;
  double beta_u = 1.0;
};

inline constexpr std::array<EffectSetting, 4> kEffectSettings{{
    {'a', 0.0, 1.0}, {'b', 0.0, -1.0}, {'c', 0.2, 1.0}, {'d', 0.2, -1.0}}};

inline constexpr std::array<double, 4> kPublishedAlphas{0.03, 0.05, 0.08, 0.10};

struct ScenarioConfig {
  Scenario scenario = Scenario::S1;
  double alpha = 0.05;        // mean per-allele effect on the risk factor
  double beta_x = 0.0;        // causal effect
  double beta_u = 1.0;        // confounder effect on the outcome
  int n_variants = 20;
  int n_per_sample = 5000;
  int n_reps = 10000;
  std::uint64_t seed = 1;
  double maf = 1.0 / 3.0;

  /// Throws input_error on out-of-range fields.
  void validate() const;
};

/// The six analyses run on every replication, in result-table order.
struct Method {
  PoolingModel model;
  WeightRule::Kind weights;
};

inline constexpr std::array<Method, 6> kMethods{{
    {PoolingModel::Fixed, WeightRule::Kind::SecondOrder},
    {PoolingModel::Fixed, WeightRule::Kind::FirstOrder},
    {PoolingModel::AdditiveRandom, WeightRule::Kind::SecondOrder},
    {PoolingModel::AdditiveRandom, WeightRule::Kind::FirstOrder},
    {PoolingModel::MultiplicativeRandom, WeightRule::Kind::SecondOrder},
    {PoolingModel::MultiplicativeRandom, WeightRule::Kind::FirstOrder},
}};

/// Position of (model, weights) in kMethods.
std::size_t method_index(PoolingModel model, WeightRule::Kind weights);

/// "second" or "first".
std::string weights_label(WeightRule::Kind weights);

/// Individual-level data for one replication. Rows [0, n_per_sample) form
/// the exposure sample; the outcome sample starts at `outcome_offset`
/// (0 for one-sample designs, n_per_sample for two-sample designs).
struct IndividualData {
  Eigen::MatrixXd genotypes;  // individuals x variants, values in {0, 1, 2}
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd alpha;   // per-variant effects on the risk factor
  Eigen::VectorXd beta_z;  // per-variant direct effects on the outcome
  Eigen::Index n_per_sample = 0;
  Eigen::Index outcome_offset = 0;
};

/// Draws one data set from the generating model for (config, rep_index).
/// `attempt` selects a fresh set of substreams; it is bumped when a variant
/// comes out monomorphic in either sample.
IndividualData generate_individual_data(const ScenarioConfig& config, std::uint64_t rep_index,
                                        std::uint32_t attempt = 0);

/// True when some variant has no genotype variation within the exposure or
/// outcome sample.
bool has_monomorphic_variant(const IndividualData& data);

struct Replication {
  SummaryDataset dataset;
  double f_statistic = 0.0;
  double r_squared = 0.0;
  std::uint32_t regenerations = 0;
};

/// Generates data (regenerating past monomorphic or collinear draws), then summarizes it
/// with one univariate regression per variant and outcome.
Replication simulate_replication(const ScenarioConfig& config, std::uint64_t rep_index);

/// The summarized associations alone.
SummaryDataset generate_replication(const ScenarioConfig& config, std::uint64_t rep_index);

/// Per-variant associations from individual data, as `lm(x ~ g[, j])` and
/// `lm(y ~ g[, j])` on the respective samples.
SummaryDataset summarize(const IndividualData& data, std::string label = "simulated");

struct MethodOutcome {
  double estimate = 0.0;
  double se = 0.0;
  bool rejected = false;  // |estimate| > 1.96 se
};

struct RepResult {
  std::array<MethodOutcome, 6> methods{};
  double f_statistic = 0.0;
  double r_squared = 0.0;
  std::uint32_t regenerations = 0;
};

/// All six analyses on one summarized data set, with theta = 0.
std::array<MethodOutcome, 6> analyze_all_methods(const SummaryDataset& dataset);

RepResult run_replication(const ScenarioConfig& config, std::uint64_t rep_index);

struct MethodSummary {
  double mean_estimate = 0.0;
  double power = 0.0;     // fraction of replications rejecting beta = 0
  double coverage = 0.0;  // fraction whose 95% CI contains the true beta_x
  double sd_estimate = 0.0;
  double mean_se = 0.0;
};

struct MonteCarloSummary {
  ScenarioConfig config;
  std::array<MethodSummary, 6> methods{};
  double mean_f = 0.0;
  double mean_r2 = 0.0;
  std::size_t n_reps_completed = 0;
  std::size_t n_reps_failed = 0;  // a numeric error in some analysis
  std::size_t n_regenerations = 0;

  const MethodSummary& method(PoolingModel model, WeightRule::Kind weights) const {
    return methods[method_index(model, weights)];
  }
};

/// Called with (replications finished, total) from worker threads,
/// serialized by the engine.
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

/// Runs config.n_reps replications on `parallelism` threads. The result does
/// not depend on `parallelism`: each replication draws from its own
/// substreams and the reduction runs in replication order.
MonteCarloSummary run_scenario(const ScenarioConfig& config, int parallelism = 1,
                               const ProgressFn& progress = {});

/// Reduction used by run_scenario, exposed for testing. Failed replications
/// are passed as std::nullopt.
MonteCarloSummary summarize_replications(const ScenarioConfig& config,
                                         std::span<const std::optional<RepResult>> reps);

struct GridSpec {
  std::vector<Scenario> scenarios;
  std::vector<double> alphas;
  std::vector<EffectSetting> settings;
  int n_reps = 10000;
  std::uint64_t seed = 1;
  int n_variants = 20;
  int n_per_sample = 5000;
};

/// Preset grids matching the published result tables: "2" (S1, S2),
/// "3" (S3, S4), "4" (S5, null effect settings only), "A6" (S6, S7).
GridSpec table_grid(const std::string& table);

std::vector<ScenarioConfig> expand_grid(const GridSpec& spec);

/// Cross product of scenarios x alphas x settings, in that nesting order.
std::vector<MonteCarloSummary> run_grid(const GridSpec& spec, int parallelism = 1,
                                        const ProgressFn& progress = {});

/// One row per (cell, method). Columns: scenario, alpha, beta_x, beta_u,
/// method, weights, mean, power_pct, sd, mean_se, mean_f, mean_r2, n_reps,
/// seed. Numbers are written at full round-trip precision.
void write_summary_csv(std::ostream& out, std::span<const MonteCarloSummary> summaries);

}  // namespace mrivw
