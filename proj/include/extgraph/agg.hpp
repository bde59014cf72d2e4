#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "extgraph/numeric.hpp"

namespace extgraph {

// Asymmetric generalised Gaussian: location nu, left scale kappa1, right scale
// kappa2, shape delta. delta = 1 is an asymmetric Laplace, delta = 2 with equal
// scales sqrt(2) is the standard Gaussian.
struct AggParams {
  double nu = 0.0;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double delta = 1.0;

  bool valid() const { return kappa1 > 0.0 && kappa2 > 0.0 && delta > 0.0; }
  friend bool operator==(const AggParams&, const AggParams&) = default;
};

// Gaussian copula with AGG margins; the precision matrix belongs to a
// correlation matrix (its inverse has unit diagonal).
struct MvaggParams {
  std::vector<AggParams> margins;
  Matrix precision;

  std::size_t dim() const { return margins.size(); }
};

double agg_pdf(double z, const AggParams& p);
double agg_logpdf(double z, const AggParams& p);
double agg_cdf(double z, const AggParams& p);
double agg_sf(double z, const AggParams& p);
double agg_quantile(double u, const AggParams& p);
// AGG quantile of Phi(w); keeps precision in both tails.
double agg_quantile_from_normal(double w, const AggParams& p);
std::vector<double> agg_sample(const AggParams& p, std::size_t n, std::uint64_t seed);

double agg_loglik(std::span<const double> z, const AggParams& p);

// Maximum-likelihood fit by Nelder-Mead on (nu, log kappa1, log kappa2, log delta).
AggParams agg_fit(std::span<const double> z);
// Same, starting from a supplied point (used by the iterative fitting schemes).
AggParams agg_fit_from(std::span<const double> z, const AggParams& start);

inline constexpr double kDeltaLo = 0.3;
inline constexpr double kDeltaHi = 10.0;
inline constexpr double kCopulaClamp = 8.0;

// Gaussian score w = Phi^{-1}(F_AGG(z)), clamped to [-8, 8]. Sets *clamped when
// the clamp was active.
double agg_gaussian_score(double z, const AggParams& p, bool* clamped = nullptr);

struct CopulaEval {
  double logdensity = 0.0;
  bool clamped = false;
};

CopulaEval mvagg_logdensity(std::span<const double> z, const MvaggParams& p);

// Sum of mvagg log-densities over the rows of z (n x dim).
CopulaEval mvagg_loglik(const Matrix& z, const MvaggParams& p);

// Draws n rows from the MVAGG distribution.
Matrix mvagg_sample(const MvaggParams& p, std::size_t n, std::uint64_t seed);

}  // namespace extgraph
