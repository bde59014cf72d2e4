#include "extgraph/gaussgraph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "extgraph/error.hpp"

namespace extgraph {

Graph::Graph(std::size_t n_nodes, const std::vector<Edge>& edges) : n_(n_nodes) {
  for (const auto& [j, k] : edges) add_edge(j, k);
}

Graph Graph::complete(std::size_t n_nodes) {
  Graph g(n_nodes);
  for (std::size_t j = 0; j < n_nodes; ++j)
    for (std::size_t k = j + 1; k < n_nodes; ++k) g.edges_.insert({j, k});
  return g;
}

void Graph::add_edge(std::size_t j, std::size_t k) {
  require(j < n_ && k < n_, ErrorKind::InvalidNode,
          "add_edge: node out of range (" + std::to_string(j) + "," + std::to_string(k) + ")");
  require(j != k, ErrorKind::InvalidNode, "add_edge: self-loop");
  edges_.insert({std::min(j, k), std::max(j, k)});
}

bool Graph::has_edge(std::size_t j, std::size_t k) const {
  if (j == k) return false;
  return edges_.count({std::min(j, k), std::max(j, k)}) > 0;
}

double WeightedGraph::weight(std::size_t j, std::size_t k) const {
  auto it = weights.find({std::min(j, k), std::max(j, k)});
  return it == weights.end() ? 0.0 : it->second;
}

Structure Structure::for_site(std::size_t site) const {
  if (kind != StructureKind::Graphical) return *this;
  return graphical(remove_node(graph, site));
}

Graph remove_node(const Graph& g, std::size_t i) {
  require(i < g.n_nodes(), ErrorKind::InvalidNode, "remove_node: node out of range");
  Graph out(g.n_nodes() - 1);
  auto relabel = [i](std::size_t v) { return v < i ? v : v - 1; };
  for (const auto& [j, k] : g.edges())
    if (j != i && k != i) out.add_edge(relabel(j), relabel(k));
  return out;
}

double glasso_objective(const Matrix& s, const Matrix& penalty, const Matrix& theta) {
  const double ld = log_det_pd(theta);
  if (std::isnan(ld)) return std::numeric_limits<double>::infinity();
  return -ld + (s.cwiseProduct(theta)).sum() + (penalty.cwiseProduct(theta.cwiseAbs())).sum();
}

namespace {

bool well_conditioned(const Matrix& corr) {
  return min_eigenvalue(corr) > 1e-10 * std::max(1.0, corr.diagonal().maxCoeff());
}

Matrix precision_from_blocks(const Matrix& w, const Matrix& beta) {
  const Eigen::Index p = w.rows();
  Matrix theta = Matrix::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    // beta column j holds the regression coefficients of column j on the
    // others (entry j itself is zero).
    const double denom = w(j, j) - w.col(j).dot(beta.col(j));
    const double tjj = 1.0 / denom;
    theta.col(j) = -beta.col(j) * tjj;
    theta(j, j) = tjj;
  }
  return 0.5 * (theta + theta.transpose());
}

}  // namespace

GlassoResult glasso(const Matrix& s, const Matrix& penalty, const GlassoOptions& opts) {
  const Eigen::Index p = s.rows();
  require(s.cols() == p && penalty.rows() == p && penalty.cols() == p,
          ErrorKind::DimensionMismatch, "glasso: dimension mismatch");
  const double smax = s.cwiseAbs().maxCoeff();
  const double forbid = opts.penalty_max > 0.0 ? opts.penalty_max : 1e6 * smax;

  GlassoResult res;
  Matrix w = s;
  w.diagonal() += penalty.diagonal();
  Matrix beta = Matrix::Zero(p, p);

  if (p == 1) {
    res.covariance = w;
    res.precision = w.inverse();
    res.converged = true;
    return res;
  }

  std::vector<Eigen::Index> others, allowed;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      others.clear();
      allowed.clear();
      bool all_unpenalised = true;
      for (Eigen::Index k = 0; k < p; ++k) {
        if (k == j) continue;
        others.push_back(k);
        if (penalty(k, j) < forbid) {
          allowed.push_back(k);
          if (penalty(k, j) != 0.0) all_unpenalised = false;
        }
      }
      Vector b = Vector::Zero(p);
      if (!allowed.empty()) {
        const auto na = static_cast<Eigen::Index>(allowed.size());
        if (all_unpenalised) {
          Matrix waa(na, na);
          Vector sa(na);
          for (Eigen::Index a = 0; a < na; ++a) {
            sa[a] = s(allowed[a], j);
            for (Eigen::Index c = 0; c < na; ++c) waa(a, c) = w(allowed[a], allowed[c]);
          }
          Vector ba = waa.llt().solve(sa);
          for (Eigen::Index a = 0; a < na; ++a) b[allowed[a]] = ba[a];
        } else {
          // Coordinate descent for the weighted lasso sub-problem, warm
          // started from the previous column coefficients.
          for (Eigen::Index k : allowed) b[k] = beta(k, j);
          for (int it = 0; it < 10000; ++it) {
            double delta = 0.0;
            for (Eigen::Index k : allowed) {
              const double r = s(k, j) - w.col(k).dot(b) + w(k, k) * b[k] + w(k, j) * b[j];
              const double lam = penalty(k, j);
              const double soft = r > lam ? r - lam : (r < -lam ? r + lam : 0.0);
              const double nb = soft / w(k, k);
              delta = std::max(delta, std::fabs(nb - b[k]));
              b[k] = nb;
            }
            if (delta < 1e-12 * (1.0 + smax)) break;
          }
        }
      }
      b[j] = 0.0;
      beta.col(j) = b;
      Vector w12 = Vector::Zero(p);
      for (Eigen::Index k : others) {
        double acc = 0.0;
        for (Eigen::Index l : allowed) acc += w(k, l) * b[l];
        w12[k] = acc;
      }
      for (Eigen::Index k : others) {
        max_change = std::max(max_change, std::fabs(w12[k] - w(k, j)));
        w(k, j) = w12[k];
        w(j, k) = w12[k];
      }
    }
    res.sweeps = sweep;
    if (opts.trace_objective)
      res.objective_trace.push_back(glasso_objective(s, penalty, precision_from_blocks(w, beta)));
    if (max_change <= opts.tol * std::max(smax, 1e-300)) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged)
    throw Error(ErrorKind::NotConverged, "glasso: iteration cap reached");
  res.covariance = w;
  res.precision = precision_from_blocks(w, beta);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index k = 0; k < p; ++k)
      if (j != k && penalty(j, k) >= forbid) res.precision(j, k) = 0.0;
  return res;
}

Graph graph_from_precision(const Matrix& precision, double eps) {
  const auto p = static_cast<std::size_t>(precision.rows());
  Graph g(p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = j + 1; k < p; ++k)
      if (std::fabs(precision(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))) > eps)
        g.add_edge(j, k);
  return g;
}

PrecisionEstimate estimate_precision_from_correlation(const Matrix& corr,
                                                      const Structure& structure) {
  const Eigen::Index p = corr.rows();
  PrecisionEstimate est;
  est.structure = structure;
  StructureKind kind = structure.kind;
  if (kind == StructureKind::Graphical) {
    require(structure.graph.n_nodes() == static_cast<std::size_t>(p), ErrorKind::DimensionMismatch,
            "estimate_precision: graph size differs from residual dimension");
    if (structure.graph.edge_count() == 0) kind = StructureKind::Independent;
    else if (structure.graph.is_complete()) kind = StructureKind::Saturated;
  }
  switch (kind) {
    case StructureKind::Independent:
      est.matrix = Matrix::Identity(p, p);
      break;
    case StructureKind::Saturated: {
      Eigen::LLT<Matrix> llt(corr);
      if (llt.info() != Eigen::Success || !well_conditioned(corr))
        throw Error(ErrorKind::SingularCorrelation, "estimate_precision: correlation not invertible");
      est.matrix = llt.solve(Matrix::Identity(p, p));
      est.matrix = 0.5 * (est.matrix + est.matrix.transpose());
      break;
    }
    case StructureKind::Graphical: {
      if (!is_positive_definite(corr) || !well_conditioned(corr))
        throw Error(ErrorKind::SingularCorrelation, "estimate_precision: correlation not invertible");
      const double forbid = 1e6 * corr.cwiseAbs().maxCoeff();
      Matrix penalty = Matrix::Zero(p, p);
      for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index k = 0; k < p; ++k)
          if (j != k && !structure.graph.has_edge(static_cast<std::size_t>(j), static_cast<std::size_t>(k)))
            penalty(j, k) = forbid;
      GlassoOptions opts;
      opts.penalty_max = forbid;
      est.matrix = glasso(corr, penalty, opts).precision;
      break;
    }
  }
  return est;
}

PrecisionEstimate estimate_precision(const Matrix& w, const Structure& structure) {
  require(w.rows() >= w.cols() + 1, ErrorKind::InvalidArgument,
          "estimate_precision: need more rows than columns");
  if (structure.kind == StructureKind::Independent) {
    PrecisionEstimate est;
    est.structure = structure;
    est.matrix = Matrix::Identity(w.cols(), w.cols());
    return est;
  }
  return estimate_precision_from_correlation(correlation(w), structure);
}

WeightedGraph combine_subgraphs(const std::vector<Graph>& subgraphs) {
  const std::size_t d = subgraphs.size();
  require(d >= 3, ErrorKind::DimensionMismatch, "combine_subgraphs: need at least 3 subgraphs");
  WeightedGraph wg;
  wg.n_nodes = d;
  std::map<Edge, int> counts;
  for (std::size_t i = 0; i < d; ++i) {
    require(subgraphs[i].n_nodes() == d - 1, ErrorKind::DimensionMismatch,
            "combine_subgraphs: subgraph " + std::to_string(i) + " has wrong node count");
    auto back = [i](std::size_t v) { return v < i ? v : v + 1; };
    for (const auto& [j, k] : subgraphs[i].edges()) ++counts[{back(j), back(k)}];
  }
  const double eligible = static_cast<double>(d - 2);
  for (const auto& [e, c] : counts) wg.weights[e] = static_cast<double>(c) / eligible;
  return wg;
}

Graph prune_majority(const WeightedGraph& wg, double threshold) {
  require(threshold > 0.0 && threshold <= 1.0, ErrorKind::InvalidArgument,
          "prune_majority: threshold outside (0,1]");
  Graph g(wg.n_nodes);
  for (const auto& [e, w] : wg.weights)
    if (w >= threshold - 1e-12) g.add_edge(e.first, e.second);
  return g;
}

}  // namespace extgraph
