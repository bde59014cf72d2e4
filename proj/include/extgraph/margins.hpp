#pragma once

#include <span>
#include <string>
#include <vector>

#include "extgraph/numeric.hpp"

namespace extgraph {

// Semi-parametric marginal distribution: interpolated empirical CDF below the
// threshold, generalised Pareto tail above it, glued at the empirical
// exceedance probability.
class MarginalModel {
 public:
  MarginalModel() = default;
  MarginalModel(std::vector<double> sorted_sample, double gpd_threshold, double gpd_scale,
                double gpd_shape, double tail_prob);

  const std::vector<double>& sorted_sample() const { return sorted_; }
  double gpd_threshold() const { return threshold_; }
  double gpd_scale() const { return scale_; }
  double gpd_shape() const { return shape_; }
  double tail_prob() const { return tail_prob_; }

  double cdf(double x) const;
  // Inverse of cdf expressed through a Laplace-scale value.
  double quantile_from_laplace(double y) const;

 private:
  double body_raw(double x) const;
  double body_raw_inverse(double g) const;

  std::vector<double> sorted_;
  double threshold_ = 0.0;
  double scale_ = 1.0;
  double shape_ = 0.0;
  double tail_prob_ = 0.5;

  std::vector<double> knots_;
  std::vector<double> knot_cdf_;
  double lower_scale_ = 1.0;
  double body_factor_ = 1.0;
};

struct LaplaceMatrix {
  Matrix values;
  std::vector<std::string> column_ids;
};

struct GpdFit {
  double scale = 1.0;
  double shape = 0.0;
  double loglik = 0.0;
};

inline constexpr double kCdfClamp = 1e-10;

// Maximum-likelihood GPD fit to positive excesses.
GpdFit fit_gpd(std::span<const double> excesses);
double gpd_loglik(std::span<const double> excesses, double scale, double shape);

MarginalModel fit_marginal(std::span<const double> column, double threshold_quantile);
double marginal_cdf(const MarginalModel& m, double x);
double to_laplace(double u);
double from_laplace(double y, const MarginalModel& m);

// Column-wise transform of raw data onto Laplace margins.
LaplaceMatrix to_laplace_matrix(const Matrix& x, const std::vector<MarginalModel>& margins,
                                std::vector<std::string> column_ids = {});

}  // namespace extgraph
