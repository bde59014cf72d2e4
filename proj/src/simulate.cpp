#include "extgraph/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "extgraph/error.hpp"
#include "extgraph/parallel.hpp"
#include "extgraph/rng.hpp"

namespace extgraph {

namespace {

constexpr std::size_t kChunk = 4096;

// Per-site sampler: Cholesky factor of the residual correlation and the
// normalisation parameters in full-dimensional index order.
struct SiteSampler {
  std::size_t site = 0;
  std::vector<std::size_t> others;
  Matrix chol;
  const ConditionalFit* fit = nullptr;

  SiteSampler(const ConditionalFit& f, std::size_t d) : site(f.site), others(other_sites(d, f.site)), fit(&f) {
    require(f.ok, ErrorKind::InvalidArgument,
            "simulation needs a fitted model at site " + std::to_string(f.site + 1));
    Matrix sigma = f.residual.precision.inverse();
    const Vector sd = sigma.diagonal().cwiseSqrt();
    sigma = sd.cwiseInverse().asDiagonal() * sigma * sd.cwiseInverse().asDiagonal();
    sigma = 0.5 * (sigma + sigma.transpose());
    chol = robust_cholesky(sigma);
  }

  // Fills row with one draw given the conditioning value yi.
  template <typename Row>
  void draw(Engine& eng, double yi, Row&& row) const {
    boost::random::normal_distribution<double> norm(0.0, 1.0);
    const auto k = static_cast<Eigen::Index>(others.size());
    Vector g(k);
    for (Eigen::Index j = 0; j < k; ++j) g[j] = norm(eng);
    const Vector w = chol.triangularView<Eigen::Lower>() * g;
    row(static_cast<Eigen::Index>(site)) = yi;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double z = agg_quantile_from_normal(w[j], fit->residual.margins[static_cast<std::size_t>(j)]);
      row(static_cast<Eigen::Index>(others[static_cast<std::size_t>(j)])) =
          fit->dep.alpha[j] * yi + std::pow(yi, fit->dep.beta[j]) * z;
    }
  }
};

Matrix to_original(const ScmevmModel& model, const Matrix& y) {
  Matrix x(y.rows(), y.cols());
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    for (Eigen::Index r = 0; r < y.rows(); ++r)
      x(r, j) = from_laplace(y(r, j), model.margins[static_cast<std::size_t>(j)]);
  return x;
}

double max_threshold(const ScmevmModel& model) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& f : model.fits) m = std::max(m, f.threshold);
  return m;
}

}  // namespace

Matrix conditional_sample(const ConditionalFit& fit, std::size_t d, double level, std::size_t n,
                          std::uint64_t seed) {
  require(level >= fit.threshold - 1e-12, ErrorKind::InvalidArgument,
          "conditioning level below the fitted dependence threshold");
  const SiteSampler sampler(fit, d);
  Matrix y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    Engine eng = make_engine(derive_seed(seed, c));
    boost::random::exponential_distribution<double> expo(1.0);
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t r = c * kChunk; r < end; ++r) {
      const double yi = level + expo(eng);
      sampler.draw(eng, yi, y.row(static_cast<Eigen::Index>(r)));
    }
  });
  return y;
}

TailProposals propose_tail(const ScmevmModel& model, double u, std::size_t n, std::uint64_t seed) {
  const std::size_t d = model.dim();
  require(model.fits.size() == d && d >= 2, ErrorKind::DimensionMismatch, "propose_tail: incomplete model");
  require(u >= max_threshold(model) - 1e-12, ErrorKind::InvalidArgument,
          "simulation threshold below a site dependence threshold");
  std::vector<SiteSampler> samplers;
  for (const auto& f : model.fits) samplers.emplace_back(f, d);

  TailProposals p;
  p.laplace_rows.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  p.site.assign(n, 0);
  p.weights.assign(n, 0.0);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    Engine eng = make_engine(derive_seed(seed, c));
    boost::random::exponential_distribution<double> expo(1.0);
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t r = c * kChunk; r < end; ++r) {
      const auto i = static_cast<std::size_t>(uniform_open(eng) * static_cast<double>(d)) % d;
      const double yi = u + expo(eng);
      auto row = p.laplace_rows.row(static_cast<Eigen::Index>(r));
      samplers[i].draw(eng, yi, row);
      std::size_t exceed = 0;
      for (Eigen::Index j = 0; j < row.size(); ++j)
        if (row(j) > u) ++exceed;
      p.site[r] = i;
      p.weights[r] = static_cast<double>(d) / static_cast<double>(exceed);
    }
  });
  return p;
}

SimulatedSample simulate_tail(const ScmevmModel& model, const SimulationConfig& cfg) {
  require(cfg.oversample >= 2.0, ErrorKind::InvalidArgument, "oversample must be at least 2");
  SimulatedSample out;
  out.rows.resize(0, static_cast<Eigen::Index>(model.dim()));
  out.laplace_rows.resize(0, static_cast<Eigen::Index>(model.dim()));
  if (cfg.n_out == 0) return out;
  const auto n_prop = static_cast<std::size_t>(std::ceil(cfg.oversample * static_cast<double>(cfg.n_out)));
  const TailProposals prop = propose_tail(model, cfg.u, n_prop, derive_seed(cfg.seed, 0));

  std::vector<double> cum(n_prop);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t l = 0; l < n_prop; ++l) {
    sum += prop.weights[l];
    sumsq += prop.weights[l] * prop.weights[l];
    cum[l] = sum;
  }
  out.n_proposals = n_prop;
  out.effective_sample_size = sum * sum / sumsq;
  out.degenerate_weights = out.effective_sample_size < static_cast<double>(cfg.n_out) / 10.0;

  Engine eng = make_engine(derive_seed(cfg.seed, 1));
  out.laplace_rows.resize(static_cast<Eigen::Index>(cfg.n_out), static_cast<Eigen::Index>(model.dim()));
  for (std::size_t r = 0; r < cfg.n_out; ++r) {
    const double target = uniform_open(eng) * sum;
    auto it = std::lower_bound(cum.begin(), cum.end(), target);
    const auto l = static_cast<Eigen::Index>(std::min<std::size_t>(
        static_cast<std::size_t>(it - cum.begin()), n_prop - 1));
    out.laplace_rows.row(static_cast<Eigen::Index>(r)) = prop.laplace_rows.row(l);
  }
  out.from_tail.assign(cfg.n_out, true);
  out.rows = to_original(model, out.laplace_rows);
  return out;
}

SimulatedSample simulate_unconditional(const ScmevmModel& model, const SimulationConfig& cfg,
                                       const LaplaceMatrix& empirical_body) {
  const Matrix& y = empirical_body.values;
  require(y.cols() == static_cast<Eigen::Index>(model.dim()) && y.rows() > 0,
          ErrorKind::DimensionMismatch, "simulate_unconditional: data does not match model");
  std::vector<Eigen::Index> body;
  for (Eigen::Index r = 0; r < y.rows(); ++r)
    if (y.row(r).maxCoeff() <= cfg.u) body.push_back(r);
  const double p_hat =
      1.0 - static_cast<double>(body.size()) / static_cast<double>(y.rows());

  Engine eng = make_engine(derive_seed(cfg.seed, 2));
  std::vector<bool> tail(cfg.n_out);
  std::size_t n_tail = 0;
  for (std::size_t r = 0; r < cfg.n_out; ++r) {
    tail[r] = uniform_open(eng) < p_hat;
    if (tail[r]) ++n_tail;
  }
  SimulationConfig tail_cfg = cfg;
  tail_cfg.n_out = n_tail;
  SimulatedSample ts = n_tail > 0 ? simulate_tail(model, tail_cfg) : SimulatedSample{};

  SimulatedSample out;
  out.p_hat = p_hat;
  out.n_proposals = ts.n_proposals;
  out.effective_sample_size = ts.effective_sample_size;
  out.degenerate_weights = ts.degenerate_weights;
  out.from_tail = tail;
  out.laplace_rows.resize(static_cast<Eigen::Index>(cfg.n_out), y.cols());
  std::size_t next_tail = 0;
  for (std::size_t r = 0; r < cfg.n_out; ++r) {
    const auto rr = static_cast<Eigen::Index>(r);
    if (tail[r]) {
      out.laplace_rows.row(rr) = ts.laplace_rows.row(static_cast<Eigen::Index>(next_tail++));
    } else {
      const auto pick = static_cast<std::size_t>(uniform_open(eng) * static_cast<double>(body.size()));
      out.laplace_rows.row(rr) = y.row(body[std::min(pick, body.size() - 1)]);
    }
  }
  out.rows = to_original(model, out.laplace_rows);
  return out;
}

TailEstimate tail_probability(const ScmevmModel& model, const TailEvent& event, std::size_t n_sim,
                              std::uint64_t seed) {
  const std::size_t d = model.dim();
  require(event.site < d, ErrorKind::InvalidNode, "tail_probability: site out of range");
  require(event.set.size() == event.levels.size(), ErrorKind::DimensionMismatch,
          "tail_probability: one level per variable in the event set");
  for (std::size_t j : event.set)
    require(j < d && j != event.site, ErrorKind::InvalidNode,
            "tail_probability: event set must exclude the conditioning site");
  require(n_sim >= 100, ErrorKind::InsufficientTailRows, "tail_probability: fewer than 100 rows");
  TailEstimate est;
  est.n = n_sim;
  if (event.set.empty()) {
    est.p = 1.0;
    return est;
  }
  const ConditionalFit& fit = model.fits[event.site];
  const double level = to_laplace(marginal_cdf(model.margins[event.site], event.site_level));
  const Matrix y = conditional_sample(fit, d, level, n_sim, seed);
  std::vector<double> lap(event.set.size());
  for (std::size_t a = 0; a < event.set.size(); ++a)
    lap[a] = to_laplace(marginal_cdf(model.margins[event.set[a]], event.levels[a]));
  std::size_t hits = 0;
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    bool all = true;
    for (std::size_t a = 0; a < event.set.size() && all; ++a)
      all = y(r, static_cast<Eigen::Index>(event.set[a])) > lap[a];
    if (all) ++hits;
  }
  est.p = static_cast<double>(hits) / static_cast<double>(n_sim);
  est.stderr_mc = std::sqrt(est.p * (1.0 - est.p) / static_cast<double>(n_sim));
  return est;
}

}  // namespace extgraph
