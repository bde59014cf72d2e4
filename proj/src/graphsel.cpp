#include "extgraph/graphsel.hpp"

#include <cmath>
#include <map>

#include "extgraph/agg.hpp"
#include "extgraph/error.hpp"
#include "extgraph/parallel.hpp"
#include "extgraph/rng.hpp"
#include "extgraph/scmevm.hpp"

namespace extgraph {

std::vector<double> default_rho_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(0.40 + 0.02 * k);
  return grid;
}

double default_selection_threshold() { return laplace_quantile(0.70); }

Graph majority_vote(const std::vector<Graph>& graphs) {
  require(!graphs.empty(), ErrorKind::InvalidArgument, "majority_vote: no graphs");
  const std::size_t d = graphs.front().n_nodes();
  std::map<Edge, std::size_t> counts;
  for (const auto& g : graphs) {
    require(g.n_nodes() == d, ErrorKind::DimensionMismatch, "majority_vote: graph sizes differ");
    for (const auto& e : g.edges()) ++counts[e];
  }
  Graph out(d);
  for (const auto& [e, c] : counts)
    if (2 * c > graphs.size()) out.add_edge(e.first, e.second);
  return out;
}

GraphSelectionReport select_graph(const Matrix& y, const std::vector<double>& thresholds,
                                  const std::vector<double>& rho_grid, const SelectOptions& opts) {
  const auto d = static_cast<std::size_t>(y.cols());
  require(d >= 3, ErrorKind::DimensionMismatch, "select_graph: need at least 3 variables");
  require(!rho_grid.empty(), ErrorKind::InvalidArgument, "select_graph: empty penalty grid");
  for (double rho : rho_grid)
    require(rho > 0.0, ErrorKind::InvalidArgument, "select_graph: penalties must be positive");
  require(thresholds.size() == 1 || thresholds.size() == d, ErrorKind::DimensionMismatch,
          "select_graph: need one threshold or one per site");

  GraphSelectionReport rep;
  rep.rho_grid = rho_grid;
  rep.site_errors.assign(d, "");
  std::vector<std::vector<Graph>> site_graphs(d);

  parallel_for(d, [&](std::size_t i) {
    const double u = thresholds.size() == 1 ? thresholds[0] : thresholds[i];
    try {
      const DependenceParams dep = ht_fit(y, i, u, derive_seed(opts.seed, i));
      const Matrix z = residuals(y, i, u, dep);
      Matrix w(z.rows(), z.cols());
      for (Eigen::Index j = 0; j < z.cols(); ++j) {
        const Vector col = z.col(j);
        const AggParams p =
            agg_fit(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
        for (Eigen::Index r = 0; r < z.rows(); ++r) w(r, j) = agg_gaussian_score(z(r, j), p);
      }
      const Matrix s = correlation(w);
      const Eigen::Index k = s.rows();
      for (double rho : rho_grid) {
        Matrix penalty = Matrix::Constant(k, k, rho);
        penalty.diagonal().setZero();
        site_graphs[i].push_back(graph_from_precision(glasso(s, penalty).precision));
      }
    } catch (const Error& e) {
      rep.site_errors[i] = std::string(to_string(e.kind())) + ": " + e.what();
      site_graphs[i].clear();
    }
  });

  for (std::size_t i = 0; i < d; ++i)
    if (rep.site_errors[i].empty()) ++rep.sites_ok;
  require(rep.sites_ok + 1 >= d, ErrorKind::NonConvergence,
          "select_graph: fewer than d-1 conditioning sites succeeded");

  std::vector<Graph> pruned;
  for (std::size_t r = 0; r < rho_grid.size(); ++r) {
    RhoSelection sel;
    sel.rho = rho_grid[r];
    for (std::size_t i = 0; i < d; ++i)
      sel.subgraphs.push_back(site_graphs[i].empty() ? Graph(d - 1) : site_graphs[i][r]);
    sel.weighted = combine_subgraphs(sel.subgraphs);
    sel.pruned = prune_majority(sel.weighted, opts.prune_threshold);
    pruned.push_back(sel.pruned);
    rep.per_rho.push_back(std::move(sel));
  }
  rep.final_graph = majority_vote(pruned);
  return rep;
}

}  // namespace extgraph
