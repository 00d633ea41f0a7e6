#pragma once

#include <string>
#include <vector>

#include "mrivw/summary_data.hpp"

namespace mrivw {

/// Which delta-method variance weights a ratio estimate.
///
/// FirstOrder keeps only se_y^2 / beta_x^2. SecondOrder adds the
/// beta_y^2 se_x^2 / beta_x^4 term. SecondOrderCorrelated additionally
/// subtracts 2 theta beta_y se_y se_x / beta_x^3, where theta is the
/// correlation between the two association estimates (nonzero when they come
/// from overlapping samples). SecondOrder is SecondOrderCorrelated at
/// theta = 0.
struct WeightRule {
  enum class Kind { FirstOrder, SecondOrder, SecondOrderCorrelated };

  Kind kind = Kind::SecondOrder;
  double theta = 0.0;

  static WeightRule first_order() { return {Kind::FirstOrder, 0.0}; }
  static WeightRule second_order() { return {Kind::SecondOrder, 0.0}; }
  /// Throws input_error unless theta is finite with |theta| <= 1.
  static WeightRule second_order_correlated(double theta);

  friend bool operator==(const WeightRule&, const WeightRule&) = default;
};

/// "first-order", "second-order" or "second-order (theta=0.1)".
std::string to_string(const WeightRule& rule);

struct RatioEstimate {
  std::string variant_id;
  double estimate = 0.0;  // beta_y / beta_x
  double variance = 0.0;  // > 0
  WeightRule rule;
};

/// beta_y / beta_x; numeric_error when beta_x is exactly zero.
double ratio_estimate(const VariantAssociation& v);

double variance_first_order(const VariantAssociation& v);
double variance_second_order(const VariantAssociation& v);

/// Throws numeric_error when the result is not strictly positive, which can
/// happen for |theta| near one.
double variance_second_order_correlated(const VariantAssociation& v, double theta);

/// The same quantity written through the ratio estimate,
/// (se_y^2 + ratio^2 se_x^2 - 2 theta ratio se_y se_x) / beta_x^2.
/// No positivity check; used as an algebraic cross-check.
double variance_second_order_correlated_ratio_form(const VariantAssociation& v, double theta);

double variance(const VariantAssociation& v, const WeightRule& rule);

RatioEstimate make_ratio_estimate(const VariantAssociation& v, const WeightRule& rule);

/// Ratio estimates for every variant, in dataset order. Errors name the
/// offending variant.
std::vector<RatioEstimate> ratio_estimates(const SummaryDataset& dataset, const WeightRule& rule);

}  // namespace mrivw
