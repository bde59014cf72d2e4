#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace extgraph {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double normal_cdf(double x);
double normal_sf(double x);
double normal_logpdf(double x);
// Quantile evaluated from whichever of (p, 1 - p) is smaller for accuracy.
double normal_quantile(double p, double q);
inline double normal_quantile(double p) { return normal_quantile(p, 1.0 - p); }

// Standard Laplace distribution.
double laplace_cdf(double y);
double laplace_sf(double y);
double laplace_quantile(double p);

// Sample correlation of the columns of x (n rows, p columns).
Matrix correlation(const Matrix& x);

// Midranks of v (1-based, ties averaged).
std::vector<double> midranks(std::span<const double> v);

// Sample quantile, linear interpolation between order statistics (R type 7).
double quantile_type7(std::vector<double> v, double q);

inline bool is_positive_definite(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

double min_eigenvalue(const Matrix& m);

// log det of a positive-definite matrix; returns NaN when Cholesky fails.
double log_det_pd(const Matrix& m);

// Rescale a precision matrix so that its inverse has unit diagonal.
Matrix precision_to_correlation_scale(const Matrix& precision);

// Lower Cholesky factor, adding diagonal jitter (at most `max_jitter`) if the
// plain factorisation fails.
Matrix robust_cholesky(const Matrix& m, double max_jitter = 1e-6);

}  // namespace extgraph
