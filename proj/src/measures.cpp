#include "extgraph/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "extgraph/error.hpp"
#include "extgraph/parallel.hpp"
#include "extgraph/rng.hpp"

namespace extgraph {

namespace {

void check_level(double u) {
  require(u > 0.0 && u < 1.0, ErrorKind::DomainError, "dependence level must lie in (0,1)");
}

void check_grid(const std::vector<double>& g) {
  require(!g.empty(), ErrorKind::InvalidArgument, "empty u grid");
  for (std::size_t k = 0; k < g.size(); ++k) {
    check_level(g[k]);
    if (k > 0) require(g[k] > g[k - 1], ErrorKind::InvalidArgument, "u grid must be strictly increasing");
  }
}

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Matrix to_uniform_ranks(const Matrix& x) {
  Matrix u(x.rows(), x.cols());
  const double denom = static_cast<double>(x.rows()) + 1.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Vector col = x.col(j);
    const auto r = midranks(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
    for (Eigen::Index i = 0; i < x.rows(); ++i) u(i, j) = r[static_cast<std::size_t>(i)] / denom;
  }
  return u;
}

ChiEstimate chi_u(const Matrix& uniform_data, double u) {
  check_level(u);
  require(uniform_data.cols() >= 1 && uniform_data.rows() >= 1, ErrorKind::DimensionMismatch,
          "chi_u: empty data");
  if (uniform_data.cols() == 1) return {1.0, false};
  std::size_t joint = 0;
  for (Eigen::Index r = 0; r < uniform_data.rows(); ++r)
    if (uniform_data.row(r).minCoeff() > u) ++joint;
  ChiEstimate est;
  est.no_exceedances = joint == 0;
  const double p = static_cast<double>(joint) / static_cast<double>(uniform_data.rows());
  est.value = std::clamp(p / (1.0 - u), 0.0, 1.0);
  return est;
}

double eta_u(const Matrix& data, double u) {
  check_level(u);
  require(data.cols() == 2, ErrorKind::DimensionMismatch, "eta_u: needs a pair of columns");
  const Matrix un = to_uniform_ranks(data);
  // Standard Pareto scores; the minimum of the pair has tail index eta.
  std::vector<double> t(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index r = 0; r < data.rows(); ++r)
    t[static_cast<std::size_t>(r)] = 1.0 / (1.0 - un.row(r).minCoeff());
  const double tu = quantile_type7(t, u);
  double sum = 0.0;
  std::size_t m = 0;
  for (double v : t)
    if (v > tu) {
      sum += std::log(v / tu);
      ++m;
    }
  require(m >= kMinEtaExceedances, ErrorKind::TooFewJointExceedances,
          "eta_u: fewer than 50 exceedances of the level");
  // identical ranks: the joint tail is the marginal tail
  if (un.col(0) == un.col(1)) return 1.0;
  const double eta = sum / static_cast<double>(m);
  return std::clamp(eta, std::numeric_limits<double>::min(), 1.0);
}

double chi_estimator(const Matrix& raw, double u) { return chi_u(to_uniform_ranks(raw), u).value; }

double eta_estimator(const Matrix& raw, double u) { return eta_u(raw, u); }

DependenceCurve estimate_curve(const Matrix& raw, const CurveEstimator& est,
                               const std::vector<double>& u_grid) {
  check_grid(u_grid);
  DependenceCurve c;
  c.u_grid = u_grid;
  for (double u : u_grid) {
    c.values.push_back(est(raw, u));
    c.stderr_values.push_back(0.0);
  }
  return c;
}

DependenceCurve bootstrap_curves(const Matrix& raw, const CurveEstimator& est,
                                 const std::vector<double>& u_grid, std::size_t n_boot,
                                 std::uint64_t seed) {
  check_grid(u_grid);
  require(n_boot >= 1, ErrorKind::InvalidArgument, "bootstrap needs at least one replicate");
  const Eigen::Index n = raw.rows();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> reps(n_boot, std::vector<double>(u_grid.size(), nan));
  parallel_for(n_boot, [&](std::size_t b) {
    Engine eng = make_engine(derive_seed(seed, b));
    Matrix sample(n, raw.cols());
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto pick = static_cast<Eigen::Index>(uniform_open(eng) * static_cast<double>(n));
      sample.row(r) = raw.row(std::min(pick, n - 1));
    }
    for (std::size_t k = 0; k < u_grid.size(); ++k) {
      try {
        reps[b][k] = est(sample, u_grid[k]);
      } catch (const Error&) {
      }
    }
  });
  DependenceCurve c;
  c.u_grid = u_grid;
  for (std::size_t k = 0; k < u_grid.size(); ++k) {
    std::vector<double> v;
    for (const auto& rep : reps)
      if (std::isfinite(rep[k])) v.push_back(rep[k]);
    if (v.empty()) {
      c.values.push_back(nan);
      c.stderr_values.push_back(nan);
      continue;
    }
    c.values.push_back(median_of(v));
    double sd = 0.0;
    if (v.size() > 1) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      for (double x : v) sd += (x - mean) * (x - mean);
      sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
    }
    c.stderr_values.push_back(sd);
  }
  return c;
}

}  // namespace extgraph
