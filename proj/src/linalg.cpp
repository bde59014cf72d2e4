#include "extgraph/error.hpp"
#include "extgraph/numeric.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>

namespace extgraph {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::TooFewExceedances: return "TooFewExceedances";
    case ErrorKind::GpdNonConvergence: return "GpdNonConvergence";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::DegenerateScale: return "DegenerateScale";
    case ErrorKind::NumericalUnderflow: return "NumericalUnderflow";
    case ErrorKind::InvalidNode: return "InvalidNode";
    case ErrorKind::SingularCorrelation: return "SingularCorrelation";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TooFewExcesses: return "TooFewExcesses";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::PdProjectionFailed: return "PdProjectionFailed";
    case ErrorKind::InsufficientTailRows: return "InsufficientTailRows";
    case ErrorKind::TooFewJointExceedances: return "TooFewJointExceedances";
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }
double normal_logpdf(double x) { return -0.5 * (x * x + kLog2Pi); }

double normal_quantile(double p, double q) {
  static const boost::math::normal_distribution<double> stdnorm;
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (q <= 0.0) return std::numeric_limits<double>::infinity();
  if (p < q) return boost::math::quantile(stdnorm, p);
  return -boost::math::quantile(stdnorm, q);
}

double laplace_cdf(double y) {
  return y < 0.0 ? 0.5 * std::exp(y) : 1.0 - 0.5 * std::exp(-y);
}
double laplace_sf(double y) {
  return y < 0.0 ? 1.0 - 0.5 * std::exp(y) : 0.5 * std::exp(-y);
}
double laplace_quantile(double p) {
  require(p > 0.0 && p < 1.0, ErrorKind::DomainError,
          "laplace_quantile: p outside (0,1)");
  return p <= 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p));
}

Matrix correlation(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Matrix centered = x.rowwise() - x.colwise().mean();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  Vector inv_sd = cov.diagonal().array().sqrt().inverse();
  Matrix corr = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
  corr.diagonal().setOnes();
  return corr;
}

std::vector<double> midranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double quantile_type7(std::vector<double> v, double q) {
  require(!v.empty(), ErrorKind::InvalidArgument, "quantile of empty sample");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double log_det_pd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Matrix precision_to_correlation_scale(const Matrix& precision) {
  Matrix sigma = precision.inverse();
  Vector sd = sigma.diagonal().array().sqrt();
  // Gamma' = D^{-1} Gamma D^{-1} with D = diag(sd)^{-1}, i.e. scale by sd.
  Matrix out = sd.asDiagonal() * precision * sd.asDiagonal();
  return 0.5 * (out + out.transpose());
}

Matrix robust_cholesky(const Matrix& m, double max_jitter) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  for (double jitter = 1e-8; jitter <= max_jitter * (1.0 + 1e-12); jitter *= 10.0) {
    Matrix shifted = m;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw Error(ErrorKind::SingularCorrelation, "Cholesky failed after jitter");
}

}  // namespace extgraph
