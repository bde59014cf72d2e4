#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "extgraph/gaussgraph.hpp"
#include "extgraph/numeric.hpp"

namespace extgraph {

struct RhoSelection {
  double rho = 0.0;
  std::vector<Graph> subgraphs;  // subgraphs[i] is on the nodes other than i
  WeightedGraph weighted;
  Graph pruned;
};

struct GraphSelectionReport {
  std::vector<double> rho_grid;
  std::vector<RhoSelection> per_rho;
  Graph final_graph;
  std::vector<std::string> site_errors;  // empty string where the site succeeded
  std::size_t sites_ok = 0;
};

// {0.40, 0.42, ..., 0.60}
std::vector<double> default_rho_grid();

// Laplace 0.70-quantile.
double default_selection_threshold();

struct SelectOptions {
  double prune_threshold = 0.5;
  std::uint64_t seed = 1;
};

// thresholds holds one Laplace-scale value per site, or a single shared value.
GraphSelectionReport select_graph(const Matrix& y, const std::vector<double>& thresholds,
                                  const std::vector<double>& rho_grid, const SelectOptions& opts = {});

// Edge kept when present in strictly more than half of the graphs.
Graph majority_vote(const std::vector<Graph>& graphs);

}  // namespace extgraph
