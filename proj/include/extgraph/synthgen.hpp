#pragma once

#include <cstdint>
#include <vector>

#include "extgraph/agg.hpp"
#include "extgraph/gaussgraph.hpp"
#include "extgraph/scmevm.hpp"

namespace extgraph {

// True parameters for the conditional-extremes generator. Normalisation and
// AGG parameters are indexed by variable and shared by all conditioning sites;
// precision is the d x d correlation-scale precision carrying the graph.
struct ScmevmTruth {
  Graph graph;
  Vector alpha;
  Vector beta;
  std::vector<AggParams> agg;
  Matrix precision;

  std::size_t dim() const { return agg.size(); }
  DependenceParams site_dependence(std::size_t i) const;
  // Gamma with row and column i deleted, rescaled to correlation scale.
  MvaggParams site_residual(std::size_t i) const;
};

struct PartialRange {
  double lo = 0.1;
  double hi = 0.4;
};

// Random precision matrix with the graph's zero pattern: U(lo, hi) partial
// correlations on edges, a diagonal ridge until the minimum eigenvalue reaches
// 0.05, then rescaling so that the inverse is a correlation matrix.
Matrix draw_graph_precision(const Graph& g, std::uint64_t seed, PartialRange range = {});

ScmevmTruth draw_params(std::size_t d, const Graph& graph, std::uint64_t seed,
                        PartialRange range = {});

inline const double kDefaultGenThreshold = 0.91629073187415510;  // -log(0.4)

// n rows of Y | Y_i > u on Laplace margins for conditioning site i.
Matrix gen_scmevm_site(const ScmevmTruth& truth, std::size_t i, std::size_t n, double u,
                       std::uint64_t seed);

// One conditional sample per site, each with n rows.
std::vector<Matrix> gen_scmevm(const ScmevmTruth& truth, std::size_t n, std::uint64_t seed,
                               double u = kDefaultGenThreshold);

enum class EllipticalKind { Gaussian, Laplace, StudentT };

const char* to_string(EllipticalKind k);

struct EllipticalTruth {
  EllipticalKind kind = EllipticalKind::Gaussian;
  Graph graph;
  Vector mean;
  Matrix correlation;
  Matrix precision;
  double dof = 5.0;
};

// Gaussian and Laplace means are U(-5, 5); Student-t is centred at 0.
EllipticalTruth draw_elliptical(EllipticalKind kind, const Graph& graph, std::uint64_t seed,
                                PartialRange range = {});

Matrix gen_elliptical(const EllipticalTruth& truth, std::size_t n, std::uint64_t seed);

// Exact margin CDF of an elliptical generator for variable j.
double elliptical_marginal_cdf(const EllipticalTruth& truth, std::size_t j, double x);
double elliptical_marginal_quantile(const EllipticalTruth& truth, std::size_t j, double p);

// Five-node graph with edges 12, 13, 23, 34, 35, 45 (0-based here).
Graph five_node_graph();

// Sixteen-node graph with 18 edges used for recovery studies.
Graph sixteen_node_graph();

// Literal correlation matrices for the five-node graph with negative
// associations (conditional-extremes residuals, Gaussian data, Laplace data).
Matrix fixture_negative_scmevm();
Matrix fixture_negative_mvg();
Matrix fixture_negative_mvl();

}  // namespace extgraph
