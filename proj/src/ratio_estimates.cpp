#include "mrivw/ratio_estimates.hpp"

#include <cmath>

#include "mrivw/error.hpp"
#include "mrivw/format.hpp"

namespace mrivw {

namespace {

void require_instrument(const VariantAssociation& v) {
  if (v.beta_x == 0.0) {
    throw numeric_error("variant '" + v.id + "': undefined ratio (null instrument, beta_x = 0)");
  }
}

}  // namespace

WeightRule WeightRule::second_order_correlated(double theta) {
  if (!std::isfinite(theta) || std::abs(theta) > 1.0) {
    throw input_error("theta must lie in [-1, 1], got " + fmt::shortest(theta));
  }
  return {Kind::SecondOrderCorrelated, theta};
}

std::string to_string(const WeightRule& rule) {
  switch (rule.kind) {
    case WeightRule::Kind::FirstOrder:
      return "first-order";
    case WeightRule::Kind::SecondOrder:
      return "second-order";
    case WeightRule::Kind::SecondOrderCorrelated:
      return "second-order (theta=" + fmt::shortest(rule.theta) + ")";
  }
  return "unknown";
}

double ratio_estimate(const VariantAssociation& v) {
  require_instrument(v);
  return v.beta_y / v.beta_x;
}

double variance_first_order(const VariantAssociation& v) {
  require_instrument(v);
  return (v.se_y * v.se_y) / (v.beta_x * v.beta_x);
}

double variance_second_order(const VariantAssociation& v) {
  require_instrument(v);
  const double bx2 = v.beta_x * v.beta_x;
  return (v.se_y * v.se_y) / bx2 + (v.beta_y * v.beta_y * v.se_x * v.se_x) / (bx2 * bx2);
}

double variance_second_order_correlated(const VariantAssociation& v, double theta) {
  require_instrument(v);
  const double bx2 = v.beta_x * v.beta_x;
  const double var = (v.se_y * v.se_y) / bx2 +
                     (v.beta_y * v.beta_y * v.se_x * v.se_x) / (bx2 * bx2) -
                     2.0 * theta * v.beta_y * v.se_y * v.se_x / (bx2 * v.beta_x);
  if (!(var > 0.0)) {
    throw numeric_error("variant '" + v.id + "': variance not positive for given theta (" +
                        fmt::shortest(theta) + ")");
  }
  return var;
}

double variance_second_order_correlated_ratio_form(const VariantAssociation& v, double theta) {
  const double ratio = ratio_estimate(v);
  return (v.se_y * v.se_y + ratio * ratio * v.se_x * v.se_x -
          2.0 * theta * ratio * v.se_y * v.se_x) /
         (v.beta_x * v.beta_x);
}

double variance(const VariantAssociation& v, const WeightRule& rule) {
  switch (rule.kind) {
    case WeightRule::Kind::FirstOrder:
      return variance_first_order(v);
    case WeightRule::Kind::SecondOrder:
      return variance_second_order(v);
    case WeightRule::Kind::SecondOrderCorrelated:
      return variance_second_order_correlated(v, rule.theta);
  }
  throw input_error("unknown weight rule");
}

RatioEstimate make_ratio_estimate(const VariantAssociation& v, const WeightRule& rule) {
  return {v.id, ratio_estimate(v), variance(v, rule), rule};
}

std::vector<RatioEstimate> ratio_estimates(const SummaryDataset& dataset, const WeightRule& rule) {
  std::vector<RatioEstimate> out;
  out.reserve(dataset.size());
  for (const auto& v : dataset) out.push_back(make_ratio_estimate(v, rule));
  return out;
}

}  // namespace mrivw
