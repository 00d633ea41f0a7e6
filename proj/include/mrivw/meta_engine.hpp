#pragma once

#include <span>
#include <string>

#include "mrivw/ratio_estimates.hpp"
#include "mrivw/summary_data.hpp"

namespace mrivw {

enum class PoolingModel { Fixed, AdditiveRandom, MultiplicativeRandom };

std::string to_string(PoolingModel model);

/// Two-sided 95% normal quantile used for every interval and test.
inline constexpr double kZ975 = 1.96;

/// A pooled inverse-variance weighted estimate.
///
/// `heterogeneity` is 0 for the fixed-effect model, the between-variant
/// standard deviation phi_A for the additive model, and the unfloored
/// dispersion ratio phi_M for the multiplicative model (the floor at 1 is
/// applied to `se` only). `q_statistic` is Cochran's Q under fixed-effect
/// weights regardless of model.
struct IvwResult {
  double estimate = 0.0;
  double se = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double heterogeneity = 0.0;
  double q_statistic = 0.0;
  double p_value = 1.0;  // H0: causal effect is zero, two-sided normal
  std::size_t n_variants = 0;
  WeightRule rule;
  PoolingModel model = PoolingModel::Fixed;
};

double two_sided_normal_p(double z);

/// Fixed-effect pooling: weights are inverse variances.
IvwResult ivw_fixed(std::span<const RatioEstimate> estimates);

/// DerSimonian-Laird moment estimate of the between-variant variance phi_A^2,
/// truncated at zero. Needs at least two estimates.
double dersimonian_laird(std::span<const RatioEstimate> estimates);

/// Additive random effects: weights 1 / (variance + phi_A^2).
IvwResult ivw_additive(std::span<const RatioEstimate> estimates);

/// Multiplicative random effects: fixed-effect point estimate, standard
/// error scaled by max(phi_M, 1) with phi_M = sqrt(Q / (J - 1)).
IvwResult ivw_multiplicative(std::span<const RatioEstimate> estimates);

IvwResult pool(std::span<const RatioEstimate> estimates, PoolingModel model);

/// Ratio estimates under `rule`, pooled under `model`.
IvwResult analyze(const SummaryDataset& dataset, const WeightRule& rule, PoolingModel model);

}  // namespace mrivw
