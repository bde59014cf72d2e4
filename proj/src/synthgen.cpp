#include "extgraph/synthgen.hpp"

#include <cmath>
#include <string>

#include <boost/math/distributions/students_t.hpp>
#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "extgraph/error.hpp"
#include "extgraph/rng.hpp"

namespace extgraph {

namespace {

double uniform(Engine& eng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  return boost::random::uniform_real_distribution<double>(lo, hi)(eng);
}

Matrix delete_index(const Matrix& m, std::size_t i) {
  const Eigen::Index n = m.rows();
  const auto ii = static_cast<Eigen::Index>(i);
  Matrix out(n - 1, n - 1);
  for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
    if (r == ii) continue;
    for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
      if (c == ii) continue;
      out(rr, cc++) = m(r, c);
    }
    ++rr;
  }
  return out;
}

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

}  // namespace

DependenceParams ScmevmTruth::site_dependence(std::size_t i) const {
  const auto idx = other_sites(dim(), i);
  DependenceParams dep;
  const auto k = static_cast<Eigen::Index>(idx.size());
  dep.alpha.resize(k);
  dep.beta.resize(k);
  dep.working_mu = Vector::Zero(k);
  dep.working_sigma = Vector::Ones(k);
  dep.beta_unidentified.assign(idx.size(), false);
  for (Eigen::Index j = 0; j < k; ++j) {
    dep.alpha[j] = alpha[static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)])];
    dep.beta[j] = beta[static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)])];
  }
  return dep;
}

MvaggParams ScmevmTruth::site_residual(std::size_t i) const {
  MvaggParams p;
  for (std::size_t j : other_sites(dim(), i)) p.margins.push_back(agg[j]);
  p.precision = precision_to_correlation_scale(delete_index(precision, i));
  return p;
}

Matrix draw_graph_precision(const Graph& g, std::uint64_t seed, PartialRange range) {
  const auto d = static_cast<Eigen::Index>(g.n_nodes());
  require(range.lo <= range.hi && range.lo >= 0.0 && range.hi < 1.0, ErrorKind::InvalidArgument,
          "partial-correlation range must satisfy 0 <= lo <= hi < 1");
  Engine eng = make_engine(seed);
  Matrix gamma = Matrix::Identity(d, d);
  for (const auto& [j, k] : g.edges()) {
    const double rho = uniform(eng, range.lo, range.hi);
    gamma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = -rho;
    gamma(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = -rho;
  }
  const double lam = min_eigenvalue(gamma);
  if (lam < 0.05) gamma.diagonal().array() += 0.05 - lam;
  gamma = precision_to_correlation_scale(gamma);
  if (!gamma.allFinite() || !is_positive_definite(gamma))
    throw Error(ErrorKind::PdProjectionFailed, "could not project the random precision to PD");
  return gamma;
}

ScmevmTruth draw_params(std::size_t d, const Graph& graph, std::uint64_t seed, PartialRange range) {
  require(graph.n_nodes() == d, ErrorKind::DimensionMismatch, "draw_params: graph size differs from d");
  require(d >= 2, ErrorKind::InvalidArgument, "draw_params: need d >= 2");
  ScmevmTruth t;
  t.graph = graph;
  Engine eng = make_engine(derive_seed(seed, 0));
  const auto n = static_cast<Eigen::Index>(d);
  t.alpha.resize(n);
  t.beta.resize(n);
  t.agg.resize(d);
  for (Eigen::Index j = 0; j < n; ++j) {
    t.alpha[j] = uniform(eng, 0.1, 0.5);
    t.beta[j] = uniform(eng, 0.1, 0.3);
    AggParams& a = t.agg[static_cast<std::size_t>(j)];
    a.nu = uniform(eng, -5.0, 5.0);
    a.kappa1 = uniform(eng, 0.5, 2.0);
    a.kappa2 = uniform(eng, 1.5, 3.0);
    a.delta = uniform(eng, 0.8, 2.5);
  }
  t.precision = draw_graph_precision(graph, derive_seed(seed, 1), range);
  return t;
}

Matrix gen_scmevm_site(const ScmevmTruth& truth, std::size_t i, std::size_t n, double u,
                       std::uint64_t seed) {
  const std::size_t d = truth.dim();
  require(i < d, ErrorKind::InvalidNode, "gen_scmevm: site out of range");
  require(u > 0.0, ErrorKind::InvalidArgument, "gen_scmevm: threshold must be positive");
  for (const auto& a : truth.agg)
    require(a.valid(), ErrorKind::InvalidArgument, "gen_scmevm: AGG parameters must be positive");
  const MvaggParams res = truth.site_residual(i);
  const DependenceParams dep = truth.site_dependence(i);
  const Matrix z = mvagg_sample(res, n, derive_seed(seed, 1));
  Engine eng = make_engine(derive_seed(seed, 0));
  boost::random::exponential_distribution<double> expo(1.0);
  const auto idx = other_sites(d, i);
  Matrix y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    const double yi = u + expo(eng);
    y(r, static_cast<Eigen::Index>(i)) = yi;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      y(r, static_cast<Eigen::Index>(idx[j])) = dep.alpha[jj] * yi + std::pow(yi, dep.beta[jj]) * z(r, jj);
    }
  }
  return y;
}

std::vector<Matrix> gen_scmevm(const ScmevmTruth& truth, std::size_t n, std::uint64_t seed, double u) {
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < truth.dim(); ++i)
    out.push_back(gen_scmevm_site(truth, i, n, u, derive_seed(seed, i)));
  return out;
}

const char* to_string(EllipticalKind k) {
  switch (k) {
    case EllipticalKind::Gaussian: return "gaussian";
    case EllipticalKind::Laplace: return "laplace";
    case EllipticalKind::StudentT: return "studentt";
  }
  return "?";
}

EllipticalTruth draw_elliptical(EllipticalKind kind, const Graph& graph, std::uint64_t seed,
                                PartialRange range) {
  EllipticalTruth t;
  t.kind = kind;
  t.graph = graph;
  const auto d = static_cast<Eigen::Index>(graph.n_nodes());
  t.mean = Vector::Zero(d);
  if (kind != EllipticalKind::StudentT) {
    Engine eng = make_engine(derive_seed(seed, 0));
    for (Eigen::Index j = 0; j < d; ++j) t.mean[j] = uniform(eng, -5.0, 5.0);
  }
  t.precision = draw_graph_precision(graph, derive_seed(seed, 1), range);
  t.correlation = t.precision.inverse();
  t.correlation = 0.5 * (t.correlation + t.correlation.transpose());
  t.correlation.diagonal().setOnes();
  return t;
}

Matrix gen_elliptical(const EllipticalTruth& truth, std::size_t n, std::uint64_t seed) {
  const Eigen::Index d = truth.mean.size();
  const Matrix l = robust_cholesky(truth.correlation);
  Engine eng = make_engine(seed);
  boost::random::normal_distribution<double> norm(0.0, 1.0);
  boost::random::exponential_distribution<double> expo(1.0);
  boost::random::chi_squared_distribution<double> chi2(truth.dof);
  Matrix x(static_cast<Eigen::Index>(n), d);
  Vector g(d);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index j = 0; j < d; ++j) g[j] = norm(eng);
    double scale = 1.0;
    if (truth.kind == EllipticalKind::Laplace) scale = std::sqrt(expo(eng));
    else if (truth.kind == EllipticalKind::StudentT) scale = std::sqrt(truth.dof / chi2(eng));
    x.row(r) = (truth.mean + scale * (l * g)).transpose();
  }
  return x;
}

double elliptical_marginal_cdf(const EllipticalTruth& truth, std::size_t j, double x) {
  const double t = x - truth.mean[static_cast<Eigen::Index>(j)];
  switch (truth.kind) {
    case EllipticalKind::Gaussian: return normal_cdf(t);
    case EllipticalKind::Laplace: return laplace_cdf(t * std::sqrt(2.0));
    case EllipticalKind::StudentT:
      return boost::math::cdf(boost::math::students_t_distribution<double>(truth.dof), t);
  }
  return 0.0;
}

double elliptical_marginal_quantile(const EllipticalTruth& truth, std::size_t j, double p) {
  require(p > 0.0 && p < 1.0, ErrorKind::DomainError, "quantile level outside (0,1)");
  const double m = truth.mean[static_cast<Eigen::Index>(j)];
  switch (truth.kind) {
    case EllipticalKind::Gaussian: return m + normal_quantile(p);
    case EllipticalKind::Laplace: return m + laplace_quantile(p) / std::sqrt(2.0);
    case EllipticalKind::StudentT:
      return m + boost::math::quantile(boost::math::students_t_distribution<double>(truth.dof), p);
  }
  return m;
}

Graph five_node_graph() {
  return Graph(5, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}});
}

Graph sixteen_node_graph() {
  // Three triangles joined by chains.
  return Graph(16, {{0, 1},  {0, 2},  {1, 2},   {2, 3},   {3, 4},   {4, 5},
                    {5, 6},  {5, 7},  {6, 7},   {7, 8},   {8, 9},   {9, 10},
                    {10, 11}, {10, 12}, {11, 12}, {12, 13}, {13, 14}, {14, 15}});
}

Matrix fixture_negative_scmevm() {
  return from_rows({{1.000, -0.308, -0.134, 0.034, 0.019},
                    {-0.308, 1.000, -0.160, 0.041, 0.023},
                    {-0.134, -0.160, 1.000, -0.254, -0.141},
                    {0.034, 0.041, -0.254, 1.000, -0.209},
                    {0.019, 0.023, -0.141, -0.209, 1.000}});
}

Matrix fixture_negative_mvg() {
  return from_rows({{1.000, -0.468, -0.370, -0.136, 0.134},
                    {-0.468, 1.000, 0.390, 0.144, -0.141},
                    {-0.370, 0.390, 1.000, 0.369, -0.362},
                    {-0.136, 0.144, 0.369, 1.000, -0.346},
                    {0.134, -0.141, -0.362, -0.346, 1.000}});
}

Matrix fixture_negative_mvl() {
  return from_rows({{1.000, -0.200, -0.139, 0.026, 0.022},
                    {-0.200, 1.000, -0.243, 0.045, 0.038},
                    {-0.139, -0.243, 1.000, -0.185, -0.158},
                    {0.026, 0.045, -0.185, 1.000, -0.276},
                    {0.022, 0.038, -0.158, -0.276, 1.000}});
}

}  // namespace extgraph
