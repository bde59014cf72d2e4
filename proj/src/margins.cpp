#include "extgraph/margins.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>

#include "extgraph/error.hpp"

namespace extgraph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Survival function of GPD(scale, shape) at excess e >= 0.
double gpd_sf(double e, double scale, double shape) {
  if (std::fabs(shape) < 1e-12) return std::exp(-e / scale);
  const double t = 1.0 + shape * e / scale;
  if (t <= 0.0) return 0.0;
  return std::pow(t, -1.0 / shape);
}

// Excess at which the GPD survival equals s.
double gpd_isf(double s, double scale, double shape) {
  if (std::fabs(shape) < 1e-12) return -scale * std::log(s);
  return scale / shape * (std::pow(s, -shape) - 1.0);
}

// Profile log-likelihood in the shape: maximise over log-scale for fixed shape.
double profile_loglik(std::span<const double> e, double shape, double* scale_out) {
  const double emax = *std::max_element(e.begin(), e.end());
  double mean = 0.0;
  for (double v : e) mean += v;
  mean /= static_cast<double>(e.size());
  double lo = std::log(std::max(1e-8 * mean, 1e-300));
  if (shape < 0.0) lo = std::max(lo, std::log(-shape * emax) + 1e-12);
  const double hi = std::log(50.0 * mean + 2.0 * emax);
  auto neg = [&](double ls) { return -gpd_loglik(e, std::exp(ls), shape); };
  auto [ls, val] = boost::math::tools::brent_find_minima(neg, lo, hi, 40);
  if (scale_out) *scale_out = std::exp(ls);
  return -val;
}

}  // namespace

double gpd_loglik(std::span<const double> e, double scale, double shape) {
  if (!(scale > 0.0)) return -kInf;
  const double m = static_cast<double>(e.size());
  if (std::fabs(shape) < 1e-12) {
    double s = 0.0;
    for (double v : e) s += v;
    return -m * std::log(scale) - s / scale;
  }
  double acc = 0.0;
  for (double v : e) {
    const double t = 1.0 + shape * v / scale;
    if (t <= 0.0) return -kInf;
    acc += std::log(t);
  }
  return -m * std::log(scale) - (1.0 + 1.0 / shape) * acc;
}

GpdFit fit_gpd(std::span<const double> excesses) {
  require(excesses.size() >= 2, ErrorKind::TooFewExceedances, "fit_gpd: too few excesses");
  // Coarse profile grid over the shape, then Brent refinement around the best
  // grid point. The shape stays strictly above -1.
  constexpr double kShapeLo = -0.999, kShapeHi = 1.5;
  double best_shape = 0.0, best_ll = -kInf;
  for (double s = -0.9; s <= 1.0 + 1e-9; s += 0.1) {
    const double ll = profile_loglik(excesses, s, nullptr);
    if (ll > best_ll) {
      best_ll = ll;
      best_shape = s;
    }
  }
  if (!std::isfinite(best_ll))
    throw Error(ErrorKind::GpdNonConvergence, "fit_gpd: profile likelihood not finite");
  const double lo = std::max(kShapeLo, best_shape - 0.1);
  const double hi = std::min(kShapeHi, best_shape + 0.1);
  auto neg = [&](double s) { return -profile_loglik(excesses, s, nullptr); };
  auto [shape, val] = boost::math::tools::brent_find_minima(neg, lo, hi, 40);
  if (-val < best_ll) shape = best_shape;
  GpdFit fit;
  fit.shape = shape;
  fit.loglik = profile_loglik(excesses, shape, &fit.scale);
  if (!std::isfinite(fit.loglik) || !(fit.scale > 0.0))
    throw Error(ErrorKind::GpdNonConvergence, "fit_gpd: optimiser failed");
  return fit;
}

MarginalModel::MarginalModel(std::vector<double> sorted_sample, double gpd_threshold,
                             double gpd_scale, double gpd_shape, double tail_prob)
    : sorted_(std::move(sorted_sample)),
      threshold_(gpd_threshold),
      scale_(gpd_scale),
      shape_(gpd_shape),
      tail_prob_(tail_prob) {
  require(!sorted_.empty(), ErrorKind::InvalidArgument, "MarginalModel: empty sample");
  require(std::is_sorted(sorted_.begin(), sorted_.end()), ErrorKind::InvalidArgument,
          "MarginalModel: sample not sorted");
  require(gpd_scale > 0.0, ErrorKind::InvalidArgument, "MarginalModel: scale <= 0");
  require(tail_prob > 0.0 && tail_prob < 1.0, ErrorKind::InvalidArgument,
          "MarginalModel: tail_prob outside (0,1)");

  const double denom = static_cast<double>(sorted_.size()) + 1.0;
  std::size_t i = 0;
  while (i < sorted_.size()) {
    std::size_t j = i;
    while (j + 1 < sorted_.size() && sorted_[j + 1] == sorted_[i]) ++j;
    knots_.push_back(sorted_[i]);
    knot_cdf_.push_back((0.5 * static_cast<double>(i + j) + 1.0) / denom);
    i = j + 1;
  }
  if (knots_.size() >= 2) {
    const std::size_t m = std::min<std::size_t>(knots_.size() - 1, 9);
    lower_scale_ = (knots_[m] - knots_[0]) / std::log(knot_cdf_[m] / knot_cdf_[0]);
  }
  if (!(lower_scale_ > 0.0)) lower_scale_ = 1.0;
  body_factor_ = (1.0 - tail_prob_) / body_raw(threshold_);
}

double MarginalModel::body_raw(double x) const {
  if (x <= knots_.front()) return knot_cdf_.front() * std::exp((x - knots_.front()) / lower_scale_);
  if (x >= knots_.back()) return knot_cdf_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - knots_.begin());
  const double t = (x - knots_[k - 1]) / (knots_[k] - knots_[k - 1]);
  return knot_cdf_[k - 1] + t * (knot_cdf_[k] - knot_cdf_[k - 1]);
}

double MarginalModel::body_raw_inverse(double g) const {
  if (g <= knot_cdf_.front()) return knots_.front() + lower_scale_ * std::log(g / knot_cdf_.front());
  if (g >= knot_cdf_.back()) return knots_.back();
  const auto it = std::upper_bound(knot_cdf_.begin(), knot_cdf_.end(), g);
  const std::size_t k = static_cast<std::size_t>(it - knot_cdf_.begin());
  const double t = (g - knot_cdf_[k - 1]) / (knot_cdf_[k] - knot_cdf_[k - 1]);
  return knots_[k - 1] + t * (knots_[k] - knots_[k - 1]);
}

double MarginalModel::cdf(double x) const {
  double u;
  if (x <= threshold_) {
    u = body_raw(x) * body_factor_;
  } else {
    u = 1.0 - tail_prob_ * gpd_sf(x - threshold_, scale_, shape_);
  }
  return std::clamp(u, kCdfClamp, 1.0 - kCdfClamp);
}

double MarginalModel::quantile_from_laplace(double y) const {
  const double s = laplace_sf(y);
  if (s < tail_prob_) return threshold_ + gpd_isf(s / tail_prob_, scale_, shape_);
  const double u = laplace_cdf(y);
  return body_raw_inverse(u / body_factor_);
}

MarginalModel fit_marginal(std::span<const double> column, double threshold_quantile) {
  require(threshold_quantile > 0.0 && threshold_quantile < 1.0, ErrorKind::DomainError,
          "fit_marginal: threshold quantile outside (0,1)");
  if (column.size() < 50)
    throw Error(ErrorKind::TooFewExceedances, "fit_marginal: column shorter than 50");
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  for (double v : sorted)
    require(std::isfinite(v), ErrorKind::InvalidArgument, "fit_marginal: non-finite value");
  const double threshold = quantile_type7(sorted, threshold_quantile);
  std::vector<double> excesses;
  for (double v : sorted)
    if (v > threshold) excesses.push_back(v - threshold);
  if (excesses.size() < 20)
    throw Error(ErrorKind::TooFewExceedances, "fit_marginal: fewer than 20 exceedances");
  const double tail_prob = static_cast<double>(excesses.size()) / static_cast<double>(sorted.size());
  const GpdFit gpd = fit_gpd(excesses);
  return MarginalModel(std::move(sorted), threshold, gpd.scale, gpd.shape, tail_prob);
}

double marginal_cdf(const MarginalModel& m, double x) { return m.cdf(x); }

double to_laplace(double u) {
  require(u > 0.0 && u < 1.0, ErrorKind::DomainError, "to_laplace: u outside (0,1)");
  return u <= 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
}

double from_laplace(double y, const MarginalModel& m) { return m.quantile_from_laplace(y); }

LaplaceMatrix to_laplace_matrix(const Matrix& x, const std::vector<MarginalModel>& margins,
                                std::vector<std::string> column_ids) {
  require(static_cast<std::size_t>(x.cols()) == margins.size(), ErrorKind::DimensionMismatch,
          "to_laplace_matrix: column count differs from margin count");
  LaplaceMatrix out;
  out.values.resize(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index k = 0; k < x.rows(); ++k)
      out.values(k, j) = to_laplace(margins[static_cast<std::size_t>(j)].cdf(x(k, j)));
  if (column_ids.empty())
    for (Eigen::Index j = 0; j < x.cols(); ++j) column_ids.push_back("X" + std::to_string(j + 1));
  out.column_ids = std::move(column_ids);
  return out;
}

}  // namespace extgraph
