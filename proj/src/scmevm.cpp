#include "extgraph/scmevm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include "extgraph/error.hpp"
#include "extgraph/nelder_mead.hpp"
#include "extgraph/parallel.hpp"
#include "extgraph/rng.hpp"

namespace extgraph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSigmaFloor = 1e-8;

bool near_bound(double v, double lo, double hi) {
  const double eps = 1e-4 * (hi - lo);
  return v <= lo + eps || v >= hi - eps;
}

struct Profile {
  double nll;
  double mu;
  double sigma;
};

// Gaussian working-residual likelihood for one pair with mu and sigma profiled out.
Profile ht_profile(const Vector& yi, const Vector& logyi, const Vector& yj, double alpha,
                   double beta) {
  const Eigen::Index n = yi.size();
  double sum = 0.0, sumsq = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const double z = (yj[r] - alpha * yi[r]) * std::exp(-beta * logyi[r]);
    sum += z;
    sumsq += z * z;
  }
  const double mu = sum / static_cast<double>(n);
  const double var = std::max(0.0, sumsq / static_cast<double>(n) - mu * mu);
  const double sigma = std::max(std::sqrt(var), kSigmaFloor);
  const double nd = static_cast<double>(n);
  const double nll = nd * std::log(sigma) + beta * logyi.sum() +
                     0.5 * (sumsq - 2.0 * mu * sum + nd * mu * mu) / (sigma * sigma) +
                     0.5 * nd * kLog2Pi;
  return {nll, mu, sigma};
}

double pearson(const Vector& a, const Vector& b) {
  const double ma = a.mean(), mb = b.mean();
  const double sab = ((a.array() - ma) * (b.array() - mb)).sum();
  const double saa = (a.array() - ma).square().sum();
  const double sbb = (b.array() - mb).square().sum();
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

Vector log_vec(const Vector& v) { return v.array().log().matrix(); }

Matrix gaussian_scores(const Matrix& z, const std::vector<AggParams>& margins, bool* clamped) {
  Matrix w(z.rows(), z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    for (Eigen::Index r = 0; r < z.rows(); ++r)
      w(r, j) = agg_gaussian_score(z(r, j), margins[static_cast<std::size_t>(j)], clamped);
  return w;
}

bool any_at_bound(const DependenceParams& dep, const std::vector<AggParams>& margins) {
  for (Eigen::Index j = 0; j < dep.alpha.size(); ++j)
    if (near_bound(dep.alpha[j], -1.0, 1.0) || near_bound(dep.beta[j], kBetaLo, kBetaHi))
      return true;
  for (const auto& m : margins)
    if (near_bound(m.delta, kDeltaLo, kDeltaHi)) return true;
  return false;
}

void finish_fit(ConditionalFit& fit, const Matrix& y) {
  const CopulaEval ev = scmevm_loglik(y, fit.site, fit.threshold, fit.dep, fit.residual);
  fit.loglik = ev.logdensity;
  fit.copula_clamped = ev.clamped;
  fit.at_bound = any_at_bound(fit.dep, fit.residual.margins);
}

// Part of the copula log-likelihood that depends on margin j, given the
// precision matrix and the Gaussian scores of the other margins.
double block_value(const Vector& zj, const AggParams& p, double gamma_jj, const Vector& c) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < zj.size(); ++r) {
    const double lf = agg_logpdf(zj[r], p);
    if (!std::isfinite(lf)) return -kInf;
    const double w = agg_gaussian_score(zj[r], p);
    total += lf + 0.5 * w * w * (1.0 - gamma_jj) - w * c[r];
  }
  return total;
}

bool agg_from_vec(const std::vector<double>& v, std::size_t off, AggParams& p) {
  p.nu = v[off];
  p.kappa1 = std::exp(v[off + 1]);
  p.kappa2 = std::exp(v[off + 2]);
  p.delta = std::exp(v[off + 3]);
  return std::isfinite(p.kappa1) && std::isfinite(p.kappa2) && p.kappa1 > 0 && p.kappa2 > 0 &&
         p.delta >= kDeltaLo && p.delta <= kDeltaHi;
}

// Iterative joint stage shared by the one- and two-step schemes. With
// update_dep the normalisation parameters of each margin join its block.
ConditionalFit iterate_joint(const Matrix& y, std::size_t i, double u, const Structure& structure,
                             const StepwiseOptions& opts, bool update_dep) {
  ConditionalFit cur =
      opts.init ? *opts.init : fit_three_step(y, i, u, structure, StepwiseOptions{opts.tol, opts.max_outer, opts.seed, {}});
  cur.method = update_dep ? FitMethod::OneStep : FitMethod::TwoStep;
  finish_fit(cur, y);

  const ExcessSet ex = excess_rows(y, i, u);
  const Vector logyi = log_vec(ex.yi);
  const Structure sub = structure.for_site(i);
  const Eigen::Index k = ex.others.cols();

  ConditionalFit best = cur;
  cur.converged = false;
  int iter = 0;
  for (iter = 1; iter <= opts.max_outer; ++iter) {
    const ConditionalFit prev = cur;
    Matrix z = residuals(y, i, u, cur.dep);
    Matrix w = gaussian_scores(z, cur.residual.margins, nullptr);
    cur.residual.precision = estimate_precision(w, sub).matrix;
    const Matrix& gamma = cur.residual.precision;

    for (Eigen::Index j = 0; j < k; ++j) {
      Vector c = Vector::Zero(w.rows());
      for (Eigen::Index l = 0; l < k; ++l)
        if (l != j && gamma(j, l) != 0.0) c += gamma(j, l) * w.col(l);
      const Vector yj = ex.others.col(j);
      const double gjj = gamma(j, j);
      AggParams& mj = cur.residual.margins[static_cast<std::size_t>(j)];

      std::vector<double> x0;
      NelderMeadOptions nm;
      nm.max_evals = 800;
      nm.ftol_rel = 1e-10;
      const double loc_step = 0.25 * std::min(mj.kappa1, mj.kappa2);
      if (update_dep) {
        x0 = {cur.dep.alpha[j], cur.dep.beta[j], mj.nu, std::log(mj.kappa1), std::log(mj.kappa2),
              std::log(mj.delta)};
        nm.step = {0.02, 0.02, loc_step, 0.1, 0.1, 0.1};
        nm.max_evals = 1200;
      } else {
        x0 = {mj.nu, std::log(mj.kappa1), std::log(mj.kappa2), std::log(mj.delta)};
        nm.step = {loc_step, 0.1, 0.1, 0.1};
      }
      Vector zj(yj.size());
      auto objective = [&](const std::vector<double>& v) {
        AggParams p;
        double penalty_beta = 0.0;
        if (update_dep) {
          const double a = v[0], b = v[1];
          if (a < -1.0 || a > 1.0 || b < kBetaLo || b > kBetaHi) return kInf;
          if (!agg_from_vec(v, 2, p)) return kInf;
          for (Eigen::Index r = 0; r < yj.size(); ++r)
            zj[r] = (yj[r] - a * ex.yi[r]) * std::exp(-b * logyi[r]);
          penalty_beta = b * logyi.sum();
        } else {
          if (!agg_from_vec(v, 0, p)) return kInf;
          zj = z.col(j);
        }
        const double val = block_value(zj, p, gjj, c) - penalty_beta;
        return std::isfinite(val) ? -val : kInf;
      };
      const double f0 = objective(x0);
      const NelderMeadResult res = nelder_mead(objective, x0, nm);
      if (res.value < f0) {
        if (update_dep) {
          cur.dep.alpha[j] = res.x[0];
          cur.dep.beta[j] = res.x[1];
          agg_from_vec(res.x, 2, mj);
          for (Eigen::Index r = 0; r < yj.size(); ++r)
            z(r, j) = (yj[r] - res.x[0] * ex.yi[r]) * std::exp(-res.x[1] * logyi[r]);
        } else {
          agg_from_vec(res.x, 0, mj);
        }
        for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, j) = agg_gaussian_score(z(r, j), mj);
      }
    }

    finish_fit(cur, y);
    if (cur.loglik > best.loglik) best = cur;

    double change = 0.0;
    for (std::size_t j = 0; j < cur.residual.margins.size(); ++j) {
      const AggParams& a = cur.residual.margins[j];
      const AggParams& b = prev.residual.margins[j];
      change = std::max({change, std::fabs(a.nu - b.nu), std::fabs(a.kappa1 - b.kappa1),
                         std::fabs(a.kappa2 - b.kappa2), std::fabs(a.delta - b.delta)});
    }
    if (update_dep)
      change = std::max({change, (cur.dep.alpha - prev.dep.alpha).cwiseAbs().maxCoeff(),
                         (cur.dep.beta - prev.dep.beta).cwiseAbs().maxCoeff()});
    if (change < opts.tol) {
      cur.converged = true;
      break;
    }
  }
  best.iterations = std::min(iter, opts.max_outer);
  best.converged = cur.converged;
  best.method = update_dep ? FitMethod::OneStep : FitMethod::TwoStep;
  if (update_dep) {
    // Working moments refreshed on the final residuals; location now lives in nu.
    const Matrix zf = residuals(y, i, u, best.dep);
    for (Eigen::Index j = 0; j < k; ++j) {
      const double m = zf.col(j).mean();
      best.dep.working_mu[j] = m;
      best.dep.working_sigma[j] = std::max(
          std::sqrt((zf.col(j).array() - m).square().mean()), kSigmaFloor);
    }
  }
  return best;
}

}  // namespace

const char* to_string(FitMethod m) {
  switch (m) {
    case FitMethod::OneStep: return "one";
    case FitMethod::TwoStep: return "two";
    case FitMethod::ThreeStep: return "three";
  }
  return "?";
}

std::vector<std::size_t> other_sites(std::size_t d, std::size_t i) {
  std::vector<std::size_t> out;
  out.reserve(d > 0 ? d - 1 : 0);
  for (std::size_t j = 0; j < d; ++j)
    if (j != i) out.push_back(j);
  return out;
}

ExcessSet excess_rows(const Matrix& y, std::size_t i, double u) {
  const auto d = static_cast<std::size_t>(y.cols());
  require(i < d, ErrorKind::InvalidNode, "conditioning site out of range");
  require(u > 0.0, ErrorKind::DomainError, "dependence threshold must be positive");
  std::vector<Eigen::Index> rows;
  const auto ii = static_cast<Eigen::Index>(i);
  for (Eigen::Index r = 0; r < y.rows(); ++r)
    if (y(r, ii) > u) rows.push_back(r);
  const auto others = other_sites(d, i);
  ExcessSet ex;
  ex.yi.resize(static_cast<Eigen::Index>(rows.size()));
  ex.others.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(others.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto rr = static_cast<Eigen::Index>(r);
    ex.yi[rr] = y(rows[r], ii);
    for (std::size_t j = 0; j < others.size(); ++j)
      ex.others(rr, static_cast<Eigen::Index>(j)) = y(rows[r], static_cast<Eigen::Index>(others[j]));
  }
  return ex;
}

DependenceParams ht_fit(const Matrix& y, std::size_t i, double u, std::uint64_t seed) {
  const ExcessSet ex = excess_rows(y, i, u);
  const auto d = static_cast<std::size_t>(y.cols());
  const auto n = static_cast<std::size_t>(ex.yi.size());
  require(n >= std::max<std::size_t>(30, d), ErrorKind::TooFewExcesses,
          "site " + std::to_string(i + 1) + ": only " + std::to_string(n) + " excess rows");
  const Vector logyi = log_vec(ex.yi);
  const Eigen::Index k = ex.others.cols();

  DependenceParams dep;
  dep.alpha.resize(k);
  dep.beta.resize(k);
  dep.working_mu.resize(k);
  dep.working_sigma.resize(k);
  dep.beta_unidentified.assign(static_cast<std::size_t>(k), false);

  for (Eigen::Index j = 0; j < k; ++j) {
    const Vector yj = ex.others.col(j);
    auto f = [&](const std::vector<double>& v) {
      if (v[0] < -1.0 || v[0] > 1.0 || v[1] < kBetaLo || v[1] > kBetaHi) return kInf;
      return ht_profile(ex.yi, logyi, yj, v[0], v[1]).nll;
    };
    NelderMeadOptions nm;
    nm.step = {0.1, 0.1};
    nm.max_evals = 2000;
    std::vector<double> x0 = {std::clamp(pearson(ex.yi, yj), -0.9, 0.9), 0.1};
    NelderMeadResult best = nelder_mead(f, x0, nm);

    Engine eng = make_engine(derive_seed(seed, i, static_cast<std::uint64_t>(j)));
    boost::random::normal_distribution<double> jitter(0.0, 0.1);
    for (int restart = 0; restart < 3; ++restart) {
      std::vector<double> xs = {std::clamp(best.x[0] + jitter(eng), -0.99, 0.99),
                                std::clamp(best.x[1] + jitter(eng), kBetaLo + 0.01, 0.99)};
      NelderMeadResult r = nelder_mead(f, xs, nm);
      if (r.value < best.value) best = r;
    }
    const Profile pr = ht_profile(ex.yi, logyi, yj, best.x[0], best.x[1]);
    dep.alpha[j] = best.x[0];
    dep.beta[j] = best.x[1];
    dep.working_mu[j] = pr.mu;
    dep.working_sigma[j] = pr.sigma;
    dep.beta_unidentified[static_cast<std::size_t>(j)] = pr.sigma <= 1e-6;
  }
  return dep;
}

Matrix residuals(const Matrix& y, std::size_t i, double u, const DependenceParams& dep) {
  const ExcessSet ex = excess_rows(y, i, u);
  require(dep.alpha.size() == ex.others.cols() && dep.beta.size() == ex.others.cols(),
          ErrorKind::DimensionMismatch, "residuals: parameter length differs from d-1");
  Matrix z(ex.others.rows(), ex.others.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r)
    for (Eigen::Index j = 0; j < z.cols(); ++j)
      z(r, j) = (ex.others(r, j) - dep.alpha[j] * ex.yi[r]) / std::pow(ex.yi[r], dep.beta[j]);
  return z;
}

CopulaEval scmevm_loglik(const Matrix& y, std::size_t i, double u, const DependenceParams& dep,
                         const MvaggParams& residual) {
  const Matrix z = residuals(y, i, u, dep);
  CopulaEval ev = mvagg_loglik(z, residual);
  const ExcessSet ex = excess_rows(y, i, u);
  ev.logdensity -= dep.beta.sum() * ex.yi.array().log().sum();
  return ev;
}

ConditionalFit fit_three_step(const Matrix& y, std::size_t i, double u, const Structure& structure,
                              const StepwiseOptions& opts) {
  ConditionalFit fit;
  fit.site = i;
  fit.threshold = u;
  fit.method = FitMethod::ThreeStep;
  fit.dep = ht_fit(y, i, u, opts.seed);
  const Matrix z = residuals(y, i, u, fit.dep);
  fit.n_excesses = static_cast<std::size_t>(z.rows());
  fit.residual.margins.resize(static_cast<std::size_t>(z.cols()));
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const Vector col = z.col(j);
    fit.residual.margins[static_cast<std::size_t>(j)] =
        agg_fit(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
  }
  const Matrix w = gaussian_scores(z, fit.residual.margins, nullptr);
  fit.residual.precision = estimate_precision(w, structure.for_site(i)).matrix;
  fit.iterations = 1;
  finish_fit(fit, y);
  return fit;
}

ConditionalFit fit_two_step(const Matrix& y, std::size_t i, double u, const Structure& structure,
                            const StepwiseOptions& opts) {
  return iterate_joint(y, i, u, structure, opts, false);
}

ConditionalFit fit_one_step(const Matrix& y, std::size_t i, double u, const Structure& structure,
                            const StepwiseOptions& opts) {
  return iterate_joint(y, i, u, structure, opts, true);
}

ConditionalFit fit_conditional(const Matrix& y, std::size_t i, double u, const Structure& structure,
                               FitMethod method, const StepwiseOptions& opts) {
  switch (method) {
    case FitMethod::OneStep: return fit_one_step(y, i, u, structure, opts);
    case FitMethod::TwoStep: return fit_two_step(y, i, u, structure, opts);
    case FitMethod::ThreeStep: break;
  }
  return fit_three_step(y, i, u, structure, opts);
}

double dependence_threshold(const FitConfig& cfg, std::size_t i) {
  double q = cfg.dependence_quantile;
  if (!cfg.site_quantiles.empty()) {
    require(i < cfg.site_quantiles.size(), ErrorKind::DimensionMismatch,
            "site_quantiles shorter than the number of sites");
    q = cfg.site_quantiles[i];
  }
  require(q > 0.5 && q < 1.0, ErrorKind::InvalidArgument,
          "dependence quantile must lie in (0.5, 1) so the threshold is positive");
  return laplace_quantile(q);
}

ScmevmModel fit_model_laplace(const LaplaceMatrix& y, std::vector<MarginalModel> margins,
                              const FitConfig& cfg) {
  const auto d = static_cast<std::size_t>(y.values.cols());
  require(margins.size() == d, ErrorKind::DimensionMismatch, "fit_model: margin count differs from d");
  if (cfg.structure.kind == StructureKind::Graphical)
    require(cfg.structure.graph.n_nodes() == d, ErrorKind::DimensionMismatch,
            "fit_model: graph has the wrong number of nodes");
  ScmevmModel model;
  model.structure = cfg.structure;
  model.margins = std::move(margins);
  model.laplace_data = y;
  model.fits.resize(d);
  parallel_for(d, [&](std::size_t i) {
    StepwiseOptions opts;
    opts.seed = derive_seed(cfg.seed, i);
    ConditionalFit& fit = model.fits[i];
    try {
      fit = fit_conditional(y.values, i, dependence_threshold(cfg, i), cfg.structure, cfg.method, opts);
    } catch (const Error& e) {
      fit = ConditionalFit{};
      fit.site = i;
      fit.method = cfg.method;
      fit.ok = false;
      fit.converged = false;
      fit.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
  });
  for (const auto& f : model.fits)
    if (!f.ok) model.partial = true;
  return model;
}

ScmevmModel fit_model(const Matrix& x, const FitConfig& cfg, std::vector<std::string> column_ids) {
  const auto d = static_cast<std::size_t>(x.cols());
  std::vector<MarginalModel> margins(d);
  parallel_for(d, [&](std::size_t j) {
    const Vector col = x.col(static_cast<Eigen::Index>(j));
    margins[j] = fit_marginal(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                              cfg.marginal_quantile);
  });
  LaplaceMatrix y = to_laplace_matrix(x, margins, std::move(column_ids));
  return fit_model_laplace(y, std::move(margins), cfg);
}

}  // namespace extgraph
