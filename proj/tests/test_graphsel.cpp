#include "doctest.h"

#include <cmath>
#include <vector>

#include "extgraph/error.hpp"
#include "extgraph/graphsel.hpp"
#include "extgraph/numeric.hpp"
#include "extgraph/synthgen.hpp"

using namespace extgraph;

namespace {

// Gaussian data on a graph, moved to Laplace margins with the true marginal cdfs.
Matrix laplace_gaussian(const Graph& g, std::size_t n, std::uint64_t seed, PartialRange range = {}) {
  const EllipticalTruth t = draw_elliptical(EllipticalKind::Gaussian, g, seed, range);
  Matrix x = gen_elliptical(t, n, seed + 1);
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      x(r, j) = laplace_quantile(elliptical_marginal_cdf(t, static_cast<std::size_t>(j), x(r, j)));
  return x;
}

bool subset_of_union(const Graph& g, const std::vector<RhoSelection>& per) {
  for (const auto& [j, k] : g.edges()) {
    bool any = false;
    for (const auto& r : per) any = any || r.pruned.has_edge(j, k);
    if (!any) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("independent columns select the empty graph") {
  const Matrix y = laplace_gaussian(Graph(6), 5000, 3);
  const GraphSelectionReport rep = select_graph(y, {default_selection_threshold()}, {0.3, 0.35, 0.4});
  CHECK(rep.sites_ok == 6);
  CHECK(rep.final_graph == Graph(6));
  for (const auto& r : rep.per_rho) CHECK(r.pruned.edge_count() == 0);
}

TEST_CASE("single penalty reduces to that penalty's pruned graph") {
  const Matrix y = laplace_gaussian(five_node_graph(), 3000, 5, {0.3, 0.5});
  const GraphSelectionReport rep = select_graph(y, {default_selection_threshold()}, {0.1});
  REQUIRE(rep.per_rho.size() == 1);
  CHECK(rep.final_graph == rep.per_rho[0].pruned);
  CHECK(rep.per_rho[0].pruned == prune_majority(rep.per_rho[0].weighted, 0.5));
  CHECK(rep.per_rho[0].weighted.weights == combine_subgraphs(rep.per_rho[0].subgraphs).weights);
}

TEST_CASE("report invariants and determinism") {
  const Matrix y = laplace_gaussian(five_node_graph(), 3000, 7, {0.3, 0.5});
  std::vector<double> grid;
  for (int k = 0; k <= 9; ++k) grid.push_back(0.05 + 0.05 * k);
  const GraphSelectionReport rep = select_graph(y, {default_selection_threshold()}, grid);
  CHECK(rep.rho_grid == grid);
  CHECK(subset_of_union(rep.final_graph, rep.per_rho));
  for (const auto& r : rep.per_rho) {
    REQUIRE(r.subgraphs.size() == 5);
    for (const auto& s : r.subgraphs) CHECK(s.n_nodes() == 4);
  }
  // sparse truth: fewer edges at the top of the grid than at the bottom
  CHECK(rep.per_rho.back().pruned.edge_count() <= rep.per_rho.front().pruned.edge_count());
  for (std::size_t k = 1; k < rep.per_rho.size(); ++k)
    CHECK(rep.per_rho[k].pruned.edge_count() <= rep.per_rho[k - 1].pruned.edge_count() + 2);

  const GraphSelectionReport again = select_graph(y, {default_selection_threshold()}, grid);
  CHECK(again.final_graph == rep.final_graph);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(again.per_rho[k].subgraphs == rep.per_rho[k].subgraphs);
    CHECK(again.per_rho[k].weighted.weights == rep.per_rho[k].weighted.weights);
  }
}

TEST_CASE("strong dependence recovers the five-node graph") {
  const Matrix y = laplace_gaussian(five_node_graph(), 5000, 9, {0.35, 0.5});
  const GraphSelectionReport rep = select_graph(y, {default_selection_threshold()}, {0.2, 0.25, 0.3});
  CHECK(rep.final_graph == five_node_graph());
}

TEST_CASE("per-site thresholds and errors") {
  const Matrix y = laplace_gaussian(Graph(4), 2000, 11);
  const double u = default_selection_threshold();
  CHECK_NOTHROW(select_graph(y, {u, u, u, u}, {0.3}));
  CHECK_THROWS_AS(select_graph(y, {u, u}, {0.3}), Error);
  CHECK_THROWS_AS(select_graph(y, {u}, {}), Error);
  CHECK_THROWS_AS(select_graph(y, {u}, {0.0}), Error);
  // a threshold leaving too few excesses at most sites
  CHECK_THROWS_AS(select_graph(y, {u, 50.0, 50.0, 50.0}, {0.3}), Error);
}

TEST_CASE("majority vote is strict") {
  const Graph a(3, {{0, 1}, {1, 2}}), b(3, {{0, 1}}), c(3, {{0, 2}});
  CHECK(majority_vote({a, b, c}) == Graph(3, {{0, 1}}));
  CHECK(majority_vote({a, c}) == Graph(3));
  CHECK(majority_vote({a}) == a);
}

TEST_CASE("default grids") {
  const auto g = default_rho_grid();
  REQUIRE(g.size() == 11);
  CHECK(g.front() == doctest::Approx(0.40));
  CHECK(g.back() == doctest::Approx(0.60));
  CHECK(default_selection_threshold() == doctest::Approx(-std::log(0.6)));
}
