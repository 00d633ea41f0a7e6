#include "mrivw/meta_engine.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "mrivw/error.hpp"

namespace mrivw {

namespace {

struct Columns {
  Eigen::ArrayXd estimate;
  Eigen::ArrayXd variance;
};

Columns columns(std::span<const RatioEstimate> estimates, std::size_t min_size) {
  if (estimates.size() < min_size) {
    throw input_error(estimates.empty() ? "no ratio estimates to pool"
                                        : "insufficient variants for a random-effects model "
                                          "(need at least 2)");
  }
  Columns c{Eigen::ArrayXd(estimates.size()), Eigen::ArrayXd(estimates.size())};
  for (std::size_t j = 0; j < estimates.size(); ++j) {
    const auto& e = estimates[j];
    if (!(e.variance > 0.0) || !std::isfinite(e.variance)) {
      throw numeric_error("variant '" + e.variant_id + "': variance must be positive and finite");
    }
    c.estimate[j] = e.estimate;
    c.variance[j] = e.variance;
  }
  return c;
}

IvwResult finish(double estimate, double se, double heterogeneity, double q,
                 std::span<const RatioEstimate> estimates, PoolingModel model) {
  IvwResult r;
  r.estimate = estimate;
  r.se = se;
  r.ci_lower = estimate - kZ975 * se;
  r.ci_upper = estimate + kZ975 * se;
  r.heterogeneity = heterogeneity;
  r.q_statistic = q;
  r.p_value = two_sided_normal_p(estimate / se);
  r.n_variants = estimates.size();
  r.rule = estimates.front().rule;
  r.model = model;
  return r;
}

struct FixedPooling {
  double estimate;
  double se;
  double q;
};

FixedPooling fixed_pooling(const Columns& c) {
  const Eigen::ArrayXd w = c.variance.inverse();
  const double sum_w = w.sum();
  const double estimate = (w * c.estimate).sum() / sum_w;
  const double q = (w * (c.estimate - estimate).square()).sum();
  return {estimate, std::sqrt(1.0 / sum_w), q};
}

double dl_tau2(const Columns& c, double q) {
  const Eigen::ArrayXd w = c.variance.inverse();
  const double s1 = w.sum();
  const double s2 = w.square().sum();
  const double df = static_cast<double>(c.estimate.size() - 1);
  return std::max(0.0, (q - df) / (s1 - s2 / s1));
}

}  // namespace

std::string to_string(PoolingModel model) {
  switch (model) {
    case PoolingModel::Fixed:
      return "fixed";
    case PoolingModel::AdditiveRandom:
      return "additive";
    case PoolingModel::MultiplicativeRandom:
      return "multiplicative";
  }
  return "unknown";
}

double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

IvwResult ivw_fixed(std::span<const RatioEstimate> estimates) {
  const auto c = columns(estimates, 1);
  const auto f = fixed_pooling(c);
  return finish(f.estimate, f.se, 0.0, f.q, estimates, PoolingModel::Fixed);
}

double dersimonian_laird(std::span<const RatioEstimate> estimates) {
  const auto c = columns(estimates, 2);
  return dl_tau2(c, fixed_pooling(c).q);
}

IvwResult ivw_additive(std::span<const RatioEstimate> estimates) {
  const auto c = columns(estimates, 2);
  const auto f = fixed_pooling(c);
  const double tau2 = dl_tau2(c, f.q);
  const Eigen::ArrayXd w = (c.variance + tau2).inverse();
  const double sum_w = w.sum();
  const double estimate = (w * c.estimate).sum() / sum_w;
  return finish(estimate, std::sqrt(1.0 / sum_w), std::sqrt(tau2), f.q, estimates,
                PoolingModel::AdditiveRandom);
}

IvwResult ivw_multiplicative(std::span<const RatioEstimate> estimates) {
  const auto c = columns(estimates, 2);
  const auto f = fixed_pooling(c);
  const double phi = std::sqrt(f.q / static_cast<double>(c.estimate.size() - 1));
  return finish(f.estimate, f.se * std::max(phi, 1.0), phi, f.q, estimates,
                PoolingModel::MultiplicativeRandom);
}

IvwResult pool(std::span<const RatioEstimate> estimates, PoolingModel model) {
  switch (model) {
    case PoolingModel::Fixed:
      return ivw_fixed(estimates);
    case PoolingModel::AdditiveRandom:
      return ivw_additive(estimates);
    case PoolingModel::MultiplicativeRandom:
      return ivw_multiplicative(estimates);
  }
  throw input_error("unknown pooling model");
}

IvwResult analyze(const SummaryDataset& dataset, const WeightRule& rule, PoolingModel model) {
  if (dataset.empty()) throw input_error("empty dataset");
  const auto estimates = ratio_estimates(dataset, rule);
  return pool(estimates, model);
}

}  // namespace mrivw
