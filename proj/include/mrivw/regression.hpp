#pragma once

// Linear-model primitives used to summarize individual-level data and to
// cross-check the pooled estimators. All functions are templated on the
// scalar type of their Eigen arguments and accept any dense expression.

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "mrivw/error.hpp"

namespace mrivw {

/// Least-squares fit of response on regressor, intercept included.
template <typename Scalar>
struct OlsFit {
  Scalar slope{};
  Scalar slope_se{};  // classical, n - 2 degrees of freedom
  Scalar intercept{};
};

/// Weighted least-squares fit through the origin.
template <typename Scalar>
struct WlsFit {
  Scalar slope{};
  Scalar slope_se_raw{};    // already multiplied by residual_sigma
  Scalar residual_sigma{};  // sqrt(sum w r^2 / (J - 1)); 0 when J == 1
};

template <typename Scalar>
struct InstrumentStrength {
  Scalar f_statistic{};
  Scalar r_squared{};
};

namespace detail {

template <typename A, typename B>
void require_same_length(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                         const char* what) {
  if (a.rows() != b.rows()) {
    throw input_error(std::string(what) + ": length mismatch (" + std::to_string(a.rows()) +
                      " vs " + std::to_string(b.rows()) + ")");
  }
}

}  // namespace detail

/// Univariate regression with intercept, as `lm(response ~ regressor)`.
/// An exact fit returns slope_se == 0 rather than failing.
template <typename DerivedY, typename DerivedX>
OlsFit<typename DerivedY::Scalar> simple_ols(const Eigen::MatrixBase<DerivedY>& response,
                                             const Eigen::MatrixBase<DerivedX>& regressor) {
  using Scalar = typename DerivedY::Scalar;
  static_assert(DerivedY::ColsAtCompileTime == 1 && DerivedX::ColsAtCompileTime == 1,
                "simple_ols expects column vectors");
  detail::require_same_length(response, regressor, "simple_ols");
  const Eigen::Index n = response.rows();
  if (n < 3) throw input_error("simple_ols: need at least 3 observations");

  const Scalar x_mean = regressor.mean();
  const Scalar y_mean = response.mean();
  const auto xc = (regressor.array() - x_mean);
  const Scalar sxx = xc.square().sum();
  if (!(sxx > Scalar(0))) throw numeric_error("simple_ols: constant regressor");
  const Scalar sxy = (xc * (response.array() - y_mean)).sum();

  OlsFit<Scalar> fit;
  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;
  const Scalar rss = ((response.array() - y_mean) - fit.slope * xc).square().sum();
  using std::sqrt;
  fit.slope_se = sqrt(rss / Scalar(n - 2) / sxx);
  return fit;
}

/// Weighted regression of y on x with no intercept, as
/// `lm(y ~ x - 1, weights = w)`.
template <typename DerivedY, typename DerivedX, typename DerivedW>
WlsFit<typename DerivedY::Scalar> weighted_no_intercept(const Eigen::MatrixBase<DerivedY>& y,
                                                        const Eigen::MatrixBase<DerivedX>& x,
                                                        const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedY::Scalar;
  detail::require_same_length(y, x, "weighted_no_intercept");
  detail::require_same_length(y, w, "weighted_no_intercept");
  const Eigen::Index n = y.rows();
  if (n < 1) throw input_error("weighted_no_intercept: empty input");
  if (!(w.array() > Scalar(0)).all()) {
    throw input_error("weighted_no_intercept: weights must be positive");
  }
  const Scalar sxx = (w.array() * x.array().square()).sum();
  if (!(sxx > Scalar(0))) throw numeric_error("weighted_no_intercept: regressor is all zero");

  WlsFit<Scalar> fit;
  fit.slope = (w.array() * x.array() * y.array()).sum() / sxx;
  using std::sqrt;
  if (n >= 2) {
    const Scalar rss = (w.array() * (y.array() - fit.slope * x.array()).square()).sum();
    fit.residual_sigma = sqrt(rss / Scalar(n - 1));
  }
  fit.slope_se_raw = fit.residual_sigma / sqrt(sxx);
  return fit;
}

/// [X'Z (Z'Z)^-1 Z'X]^-1 X'Z (Z'Z)^-1 Z'Y for a single exposure column X.
/// No intercept is added; center the columns first to include one.
template <typename DerivedX, typename DerivedY, typename DerivedZ>
typename DerivedX::Scalar two_stage_least_squares(const Eigen::MatrixBase<DerivedX>& X,
                                                  const Eigen::MatrixBase<DerivedY>& Y,
                                                  const Eigen::MatrixBase<DerivedZ>& Z) {
  using Scalar = typename DerivedX::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (X.cols() != 1 || Y.cols() != 1) {
    throw input_error("two_stage_least_squares: X and Y must have one column");
  }
  detail::require_same_length(X, Y, "two_stage_least_squares");
  detail::require_same_length(X, Z, "two_stage_least_squares");
  if (X.rows() <= Z.cols()) {
    throw input_error("two_stage_least_squares: need more observations than instruments");
  }

  const Matrix gram = Z.transpose() * Z;
  const Eigen::ColPivHouseholderQR<Matrix> qr(gram);
  if (qr.rank() < gram.cols()) throw numeric_error("two_stage_least_squares: Z'Z is singular");

  const Vector zx = Z.transpose() * X.col(0);
  const Vector zy = Z.transpose() * Y.col(0);
  const Vector projected = qr.solve(zx);  // (Z'Z)^-1 Z'X
  const Scalar denominator = projected.dot(zx);
  if (!(denominator != Scalar(0))) {
    throw numeric_error("two_stage_least_squares: instruments do not predict the exposure");
  }
  return projected.dot(zy) / denominator;
}

/// F statistic and R^2 of the regression of x on all columns of Z with an
/// intercept.
template <typename DerivedX, typename DerivedZ>
InstrumentStrength<typename DerivedX::Scalar> joint_f_and_r2(const Eigen::MatrixBase<DerivedX>& x,
                                                             const Eigen::MatrixBase<DerivedZ>& Z) {
  using Scalar = typename DerivedX::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  detail::require_same_length(x, Z, "joint_f_and_r2");
  const Eigen::Index n = Z.rows();
  const Eigen::Index k = Z.cols();
  if (n <= k + 1) throw input_error("joint_f_and_r2: need more observations than parameters");

  const Matrix zc = Z.rowwise() - Z.colwise().mean();
  const Vector xc = x.col(0).array() - x.mean();
  const Matrix gram = zc.transpose() * zc;
  const Eigen::ColPivHouseholderQR<Matrix> qr(gram);
  if (qr.rank() < k) throw numeric_error("joint_f_and_r2: singular design");

  const Vector zx = zc.transpose() * xc;
  const Scalar explained = qr.solve(zx).dot(zx);
  const Scalar total = xc.squaredNorm();
  if (!(total > Scalar(0))) throw numeric_error("joint_f_and_r2: constant response");

  InstrumentStrength<Scalar> out;
  out.r_squared = explained / total;
  const Scalar residual = total - explained;
  out.f_statistic = (explained / Scalar(k)) / (residual / Scalar(n - k - 1));
  return out;
}

}  // namespace mrivw
