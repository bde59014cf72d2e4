#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "extgraph/numeric.hpp"

namespace extgraph {

using Edge = std::pair<std::size_t, std::size_t>;  // canonical: first < second

// Simple undirected graph on nodes 0..n-1.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n_nodes) : n_(n_nodes) {}
  Graph(std::size_t n_nodes, const std::vector<Edge>& edges);

  static Graph complete(std::size_t n_nodes);

  std::size_t n_nodes() const { return n_; }
  const std::set<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t max_edges() const { return n_ * (n_ > 0 ? n_ - 1 : 0) / 2; }
  bool is_complete() const { return edge_count() == max_edges(); }

  void add_edge(std::size_t j, std::size_t k);
  bool has_edge(std::size_t j, std::size_t k) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t n_ = 0;
  std::set<Edge> edges_;
};

struct WeightedGraph {
  std::size_t n_nodes = 0;
  std::map<Edge, double> weights;  // only edges with positive weight are stored

  double weight(std::size_t j, std::size_t k) const;
};

enum class StructureKind { Independent, Saturated, Graphical };

// Residual dependence structure. For Graphical the graph is on the full set of
// variables of the problem it is applied to.
struct Structure {
  StructureKind kind = StructureKind::Independent;
  Graph graph;

  static Structure independent() { return {StructureKind::Independent, {}}; }
  static Structure saturated() { return {StructureKind::Saturated, {}}; }
  static Structure graphical(Graph g) { return {StructureKind::Graphical, std::move(g)}; }

  // Structure of the residual vector when variable `site` is conditioned on.
  Structure for_site(std::size_t site) const;
};

struct PrecisionEstimate {
  Matrix matrix;
  Structure structure;
};

struct GlassoOptions {
  double tol = 1e-6;
  int max_sweeps = 500;
  // Entries whose penalty is at least this value are structural zeros. A
  // non-positive value means 1e6 * max|S|.
  double penalty_max = 0.0;
  bool trace_objective = false;
};

struct GlassoResult {
  Matrix precision;
  Matrix covariance;
  int sweeps = 0;
  bool converged = false;
  std::vector<double> objective_trace;
};

// Relabels nodes after deleting node i; edges incident to i are dropped.
Graph remove_node(const Graph& g, std::size_t i);

// Penalised Gaussian log-likelihood objective (to be minimised):
// -log det Theta + tr(S Theta) + sum penalty_jk |Theta_jk|.
double glasso_objective(const Matrix& s, const Matrix& penalty, const Matrix& theta);

GlassoResult glasso(const Matrix& s, const Matrix& penalty, const GlassoOptions& opts = {});

// Support of the off-diagonal entries of a precision matrix.
Graph graph_from_precision(const Matrix& precision, double eps = 1e-10);

PrecisionEstimate estimate_precision(const Matrix& w, const Structure& structure);

// Precision estimate from a correlation (or covariance) matrix directly.
PrecisionEstimate estimate_precision_from_correlation(const Matrix& corr,
                                                      const Structure& structure);

// subgraphs[i] lives on the nodes other than i (relabelled order-preservingly).
WeightedGraph combine_subgraphs(const std::vector<Graph>& subgraphs);

Graph prune_majority(const WeightedGraph& wg, double threshold = 0.5);

}  // namespace extgraph
