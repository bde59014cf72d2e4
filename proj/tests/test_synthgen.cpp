#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "extgraph/error.hpp"
#include "extgraph/gaussgraph.hpp"
#include "extgraph/measures.hpp"
#include "extgraph/numeric.hpp"
#include "extgraph/scmevm.hpp"
#include "extgraph/synthgen.hpp"

using namespace extgraph;

namespace {

double ks_exp(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double dmax = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double f = 1.0 - std::exp(-x[k]);
    dmax = std::max({dmax, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
  }
  return dmax;
}

Graph support(const Matrix& m, double eps) { return graph_from_precision(m, eps); }

}  // namespace

TEST_CASE("parameter draws stay in their ranges") {
  double amin = 1, amax = 0, bmin = 1, bmax = 0;
  double lo[4] = {1e9, 1e9, 1e9, 1e9}, hi[4] = {-1e9, -1e9, -1e9, -1e9};
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const ScmevmTruth t = draw_params(5, five_node_graph(), s);
    amin = std::min(amin, t.alpha.minCoeff());
    amax = std::max(amax, t.alpha.maxCoeff());
    bmin = std::min(bmin, t.beta.minCoeff());
    bmax = std::max(bmax, t.beta.maxCoeff());
    for (const auto& a : t.agg) {
      const double v[4] = {a.nu, a.kappa1, a.kappa2, a.delta};
      for (int k = 0; k < 4; ++k) {
        lo[k] = std::min(lo[k], v[k]);
        hi[k] = std::max(hi[k], v[k]);
      }
    }
  }
  CHECK(amin > 0.1);
  CHECK(amax < 0.5);
  CHECK(amax > 0.49);
  CHECK(bmin > 0.1);
  CHECK(bmax < 0.3);
  CHECK(lo[0] > -5.0);
  CHECK(hi[0] < 5.0);
  CHECK(lo[1] > 0.5);
  CHECK(hi[1] < 2.0);
  CHECK(lo[2] > 1.5);
  CHECK(hi[2] < 3.0);
  CHECK(lo[3] > 0.8);
  CHECK(hi[3] < 2.5);
}

TEST_CASE("drawn precision carries the graph") {
  const Graph g = five_node_graph();
  const ScmevmTruth t = draw_params(5, g, 9);
  CHECK(support(t.precision, 0.0) == g);
  CHECK(min_eigenvalue(t.precision) > 1e-6);
  const Matrix cov = t.precision.inverse();
  CHECK((cov.diagonal().array() - 1.0).abs().maxCoeff() < 1e-10);
  for (std::size_t i = 0; i < 5; ++i) {
    const MvaggParams r = t.site_residual(i);
    CHECK(support(r.precision, 0.0) == remove_node(g, i));
    CHECK(min_eigenvalue(r.precision) > 1e-6);
    CHECK((r.precision.inverse().diagonal().array() - 1.0).abs().maxCoeff() < 1e-10);
  }
  const ScmevmTruth e = draw_params(4, Graph(4), 9);
  CHECK(e.precision == Matrix::Identity(4, 4));
  CHECK(e.site_residual(2).precision == Matrix::Identity(3, 3));
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Matrix p = draw_graph_precision(sixteen_node_graph(), s, {0.1, 0.4});
    CHECK(min_eigenvalue(p) > 1e-6);
    CHECK(support(p, 0.0) == sixteen_node_graph());
  }
}

TEST_CASE("conditional generator") {
  const ScmevmTruth t = draw_params(5, five_node_graph(), 13);
  const Matrix y = gen_scmevm_site(t, 2, 100000, kDefaultGenThreshold, 14);
  std::vector<double> exc(static_cast<std::size_t>(y.rows()));
  for (Eigen::Index r = 0; r < y.rows(); ++r) exc[static_cast<std::size_t>(r)] = y(r, 2) - kDefaultGenThreshold;
  CHECK(*std::min_element(exc.begin(), exc.end()) > 0.0);
  CHECK(ks_exp(exc) < 1.628 / std::sqrt(1e5));
  CHECK(gen_scmevm_site(t, 2, 50, kDefaultGenThreshold, 14) == y.topRows(50));
  // residuals of the truth recover the AGG margins
  const Matrix z = residuals(y, 2, kDefaultGenThreshold, t.site_dependence(2));
  const std::vector<std::size_t> others = other_sites(5, 2);
  for (Eigen::Index j = 0; j < 4; ++j) {
    const AggParams& a = t.agg[others[static_cast<std::size_t>(j)]];
    const double below = (z.col(j).array() < a.nu).cast<double>().mean();
    CHECK(std::fabs(below - a.kappa1 / (a.kappa1 + a.kappa2)) < 0.01);
  }
  const auto all = gen_scmevm(t, 200, 3);
  REQUIRE(all.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK((all[i].col(static_cast<Eigen::Index>(i)).array() > kDefaultGenThreshold).all());

  ScmevmTruth bad = t;
  bad.agg[0].kappa1 = 0.0;
  CHECK_THROWS_AS(gen_scmevm_site(bad, 2, 10, kDefaultGenThreshold, 1), Error);
}

TEST_CASE("three-step fit on generated data returns the zero pattern") {
  const Graph g = five_node_graph();
  const ScmevmTruth t = draw_params(5, g, 17);
  const auto data = gen_scmevm(t, 4000, 18);
  for (std::size_t i = 0; i < 5; ++i) {
    const ConditionalFit f = fit_three_step(data[i], i, kDefaultGenThreshold, Structure::graphical(g));
    CHECK(support(f.residual.precision, 0.0) == remove_node(g, i));
  }
}

TEST_CASE("elliptical generators") {
  const Graph g = five_node_graph();
  const EllipticalTruth gt = draw_elliptical(EllipticalKind::Gaussian, g, 21);
  CHECK((gt.mean.array().abs() < 5.0).all());
  CHECK(support(gt.precision, 0.0) == g);
  const Matrix x = gen_elliptical(gt, 100000, 22);
  CHECK(gen_elliptical(gt, 10, 22) == x.topRows(10));
  // estimation loop: glasso constrained to the truth reproduces it, and the
  // sample precision is small off the graph
  const Matrix sp = correlation(x).inverse();
  for (Eigen::Index j = 0; j < 5; ++j)
    for (Eigen::Index k = j + 1; k < 5; ++k)
      if (!g.has_edge(static_cast<std::size_t>(j), static_cast<std::size_t>(k))) CHECK(std::fabs(sp(j, k)) < 0.03);
  Matrix pen = Matrix::Constant(5, 5, 0.02);
  pen.diagonal().setZero();
  CHECK(graph_from_precision(glasso(correlation(x), pen).precision) == g);

  const EllipticalTruth lt = draw_elliptical(EllipticalKind::Laplace, g, 23);
  const Matrix l = gen_elliptical(lt, 1000000, 24);
  for (Eigen::Index j = 0; j < 5; ++j) {
    const Eigen::ArrayXd c = l.col(j).array() - lt.mean[j];
    const double m2 = (c * c).mean(), m4 = (c * c * c * c).mean();
    CHECK(std::fabs(m4 / (m2 * m2) - 3.0 - 3.0) < 0.3);
    CHECK(std::fabs(l.col(j).mean() - lt.mean[j]) < 0.01);
  }
  // exact marginal cdfs
  for (const auto kind : {EllipticalKind::Gaussian, EllipticalKind::Laplace, EllipticalKind::StudentT}) {
    const EllipticalTruth t = draw_elliptical(kind, g, 25);
    const Matrix s = gen_elliptical(t, 200000, 26);
    for (double p : {0.1, 0.5, 0.9, 0.99}) {
      const double q = elliptical_marginal_quantile(t, 1, p);
      CHECK(elliptical_marginal_cdf(t, 1, q) == doctest::Approx(p).epsilon(1e-10));
      CHECK(std::fabs((s.col(1).array() <= q).cast<double>().mean() - p) < 0.005);
    }
  }
}

TEST_CASE("student-t pairs have heavier joint tails than Gaussian") {
  const Graph g(2, {{0, 1}});
  const EllipticalTruth gt = draw_elliptical(EllipticalKind::Gaussian, g, 31, {0.4, 0.4});
  const EllipticalTruth tt = draw_elliptical(EllipticalKind::StudentT, g, 31, {0.4, 0.4});
  CHECK(tt.correlation == gt.correlation);
  const double eg = eta_estimator(gen_elliptical(gt, 100000, 32), 0.95);
  const double et = eta_estimator(gen_elliptical(tt, 100000, 32), 0.95);
  CHECK(et > eg);
}

TEST_CASE("negative-association fixtures") {
  for (const Matrix& m : {fixture_negative_scmevm(), fixture_negative_mvg(), fixture_negative_mvl()}) {
    REQUIRE(m.rows() == 5);
    CHECK(min_eigenvalue(m) > 1e-6);
    CHECK((m.diagonal().array() - 1.0).abs().maxCoeff() < 1e-12);
    const Matrix p = m.inverse();
    CHECK(support(p, 1e-3) == five_node_graph());
  }
}
