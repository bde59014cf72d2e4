#include "extgraph/agg.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <limits>

#include "extgraph/error.hpp"
#include "extgraph/nelder_mead.hpp"
#include "extgraph/rng.hpp"

namespace extgraph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_norm_const(const AggParams& p) {
  return std::log(p.delta) - std::log(p.kappa1 + p.kappa2) - std::lgamma(1.0 / p.delta);
}

double left_weight(const AggParams& p) { return p.kappa1 / (p.kappa1 + p.kappa2); }

}  // namespace

double agg_logpdf(double z, const AggParams& p) {
  const double t = z < p.nu ? (p.nu - z) / p.kappa1 : (z - p.nu) / p.kappa2;
  return log_norm_const(p) - std::pow(t, p.delta);
}

double agg_pdf(double z, const AggParams& p) { return std::exp(agg_logpdf(z, p)); }

double agg_cdf(double z, const AggParams& p) {
  const double w1 = left_weight(p);
  const double a = 1.0 / p.delta;
  if (z < p.nu) return w1 * boost::math::gamma_q(a, std::pow((p.nu - z) / p.kappa1, p.delta));
  return w1 + (1.0 - w1) * boost::math::gamma_p(a, std::pow((z - p.nu) / p.kappa2, p.delta));
}

double agg_sf(double z, const AggParams& p) {
  const double w1 = left_weight(p);
  const double a = 1.0 / p.delta;
  if (z >= p.nu)
    return (1.0 - w1) * boost::math::gamma_q(a, std::pow((z - p.nu) / p.kappa2, p.delta));
  return (1.0 - w1) + w1 * boost::math::gamma_p(a, std::pow((p.nu - z) / p.kappa1, p.delta));
}

namespace {

// Quantile from the pair (u, 1 - u) so that both tails keep full precision.
double agg_quantile_pq(double u, double q, const AggParams& p) {
  const double w1 = left_weight(p);
  const double w2 = 1.0 - w1;
  const double a = 1.0 / p.delta;
  if (u < w1) {
    const double r = u / w1;  // upper regularised gamma of the left tail
    const double s = r > 0.5 ? boost::math::gamma_p_inv(a, 1.0 - r) : boost::math::gamma_q_inv(a, r);
    return p.nu - p.kappa1 * std::pow(s, a);
  }
  const double r = (u - w1) / w2;
  if (r <= 0.0) return p.nu;
  const double s = r < 0.5 ? boost::math::gamma_p_inv(a, r) : boost::math::gamma_q_inv(a, q / w2);
  return p.nu + p.kappa2 * std::pow(s, a);
}

}  // namespace

double agg_quantile(double u, const AggParams& p) {
  require(u > 0.0 && u < 1.0, ErrorKind::DomainError, "agg_quantile: u outside (0,1)");
  return agg_quantile_pq(u, 1.0 - u, p);
}

double agg_quantile_from_normal(double w, const AggParams& p) {
  return agg_quantile_pq(normal_cdf(w), normal_sf(w), p);
}

std::vector<double> agg_sample(const AggParams& p, std::size_t n, std::uint64_t seed) {
  Engine eng = make_engine(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = agg_quantile(uniform_open(eng), p);
  return out;
}

double agg_loglik(std::span<const double> z, const AggParams& p) {
  if (!p.valid()) return -kInf;
  double acc = 0.0;
  for (double v : z) {
    const double t = v < p.nu ? (p.nu - v) / p.kappa1 : (v - p.nu) / p.kappa2;
    acc += std::pow(t, p.delta);
  }
  return static_cast<double>(z.size()) * log_norm_const(p) - acc;
}

AggParams agg_fit_from(std::span<const double> z, const AggParams& start) {
  auto unpack = [](const std::vector<double>& x) {
    return AggParams{x[0], std::exp(x[1]), std::exp(x[2]), std::exp(x[3])};
  };
  const double log_dlo = std::log(kDeltaLo), log_dhi = std::log(kDeltaHi);
  auto objective = [&](const std::vector<double>& x) {
    if (x[3] < log_dlo || x[3] > log_dhi) return kInf;
    const double ll = agg_loglik(z, unpack(x));
    return std::isfinite(ll) ? -ll : kInf;
  };
  std::vector<double> x{start.nu, std::log(start.kappa1), std::log(start.kappa2),
                        std::log(std::clamp(start.delta, kDeltaLo, kDeltaHi))};
  NelderMeadOptions opts;
  opts.step = {0.25 * std::min(start.kappa1, start.kappa2), 0.2, 0.2, 0.2};
  opts.max_evals = 3000;
  double best = objective(x);
  if (!std::isfinite(best))
    throw Error(ErrorKind::NonConvergence, "agg_fit: initial point has non-finite likelihood");
  // Restart from the incumbent until a restart no longer improves.
  for (int restart = 0; restart < 8; ++restart) {
    NelderMeadResult r = nelder_mead(objective, x, opts);
    const double gain = best - r.value;
    if (r.value <= best) {
      x = r.x;
      best = r.value;
    }
    if (gain <= 1e-9 * (1.0 + std::fabs(best))) break;
    for (auto& s : opts.step) s *= 0.5;
  }
  if (!std::isfinite(best)) throw Error(ErrorKind::NonConvergence, "agg_fit: did not converge");
  return unpack(x);
}

AggParams agg_fit(std::span<const double> z) {
  require(z.size() >= 2, ErrorKind::InvalidArgument, "agg_fit: sample too small");
  std::vector<double> sorted(z.begin(), z.end());
  std::sort(sorted.begin(), sorted.end());
  const double median = quantile_type7(sorted, 0.5);
  double mad = 0.0;
  for (double v : sorted) mad += std::fabs(v - median);
  mad /= static_cast<double>(sorted.size());
  if (!(mad > 1e-12 * (1.0 + std::fabs(median))) || sorted.front() == sorted.back())
    throw Error(ErrorKind::DegenerateScale, "agg_fit: sample has zero spread");
  return agg_fit_from(z, AggParams{median, mad, mad, 1.5});
}

double agg_gaussian_score(double z, const AggParams& p, bool* clamped) {
  double w = normal_quantile(agg_cdf(z, p), agg_sf(z, p));
  if (!(std::fabs(w) <= kCopulaClamp)) {
    w = std::isnan(w) ? 0.0 : std::clamp(w, -kCopulaClamp, kCopulaClamp);
    if (clamped) *clamped = true;
  }
  return w;
}

namespace {

CopulaEval copula_rows(const Matrix& z, const MvaggParams& p, double log_det) {
  const auto k = static_cast<Eigen::Index>(p.dim());
  require(z.cols() == k && p.precision.rows() == k && p.precision.cols() == k,
          ErrorKind::DimensionMismatch, "mvagg: dimension mismatch");
  CopulaEval out;
  std::vector<double> norm(p.dim());
  for (std::size_t j = 0; j < p.dim(); ++j) norm[j] = log_norm_const(p.margins[j]);
  Vector w(k);
  double total = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    double row = 0.5 * log_det - 0.5 * static_cast<double>(k) * kLog2Pi;
    for (Eigen::Index j = 0; j < k; ++j) {
      const AggParams& m = p.margins[static_cast<std::size_t>(j)];
      const double zj = z(r, j);
      w[j] = agg_gaussian_score(zj, m, &out.clamped);
      const double t = zj < m.nu ? (m.nu - zj) / m.kappa1 : (zj - m.nu) / m.kappa2;
      row += norm[static_cast<std::size_t>(j)] - std::pow(t, m.delta) - normal_logpdf(w[j]);
    }
    row -= 0.5 * w.dot(p.precision * w);
    total += row;
  }
  out.logdensity = total;
  return out;
}

}  // namespace

CopulaEval mvagg_logdensity(std::span<const double> z, const MvaggParams& p) {
  Matrix row(1, static_cast<Eigen::Index>(z.size()));
  for (std::size_t j = 0; j < z.size(); ++j) row(0, static_cast<Eigen::Index>(j)) = z[j];
  return copula_rows(row, p, log_det_pd(p.precision));
}

CopulaEval mvagg_loglik(const Matrix& z, const MvaggParams& p) {
  return copula_rows(z, p, log_det_pd(p.precision));
}

Matrix mvagg_sample(const MvaggParams& p, std::size_t n, std::uint64_t seed) {
  const auto k = static_cast<Eigen::Index>(p.dim());
  Matrix sigma = p.precision.inverse();
  Vector inv_sd = sigma.diagonal().array().sqrt().inverse();
  sigma = inv_sd.asDiagonal() * sigma * inv_sd.asDiagonal();
  const Matrix chol = robust_cholesky(0.5 * (sigma + sigma.transpose()));
  Engine eng = make_engine(seed);
  boost::random::normal_distribution<double> normal;
  Matrix out(static_cast<Eigen::Index>(n), k);
  Vector g(k);
  for (std::size_t r = 0; r < n; ++r) {
    for (Eigen::Index j = 0; j < k; ++j) g[j] = normal(eng);
    const Vector w = chol * g;
    for (Eigen::Index j = 0; j < k; ++j) {
      out(static_cast<Eigen::Index>(r), j) =
          agg_quantile_from_normal(w[j], p.margins[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

}  // namespace extgraph
