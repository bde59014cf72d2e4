#include "extgraph/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "extgraph/error.hpp"
#include "extgraph/graphsel.hpp"
#include "extgraph/io.hpp"
#include "extgraph/margins.hpp"
#include "extgraph/parallel.hpp"
#include "extgraph/rng.hpp"
#include "extgraph/scmevm.hpp"
#include "extgraph/simulate.hpp"

namespace extgraph {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

LaplaceMatrix laplace_from_raw(const Matrix& x, double marginal_quantile) {
  std::vector<MarginalModel> margins;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Vector col = x.col(j);
    margins.push_back(fit_marginal(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                                   marginal_quantile));
  }
  return to_laplace_matrix(x, margins);
}

// Non-empty subsets of `items`, in increasing bitmask order.
std::vector<std::vector<std::size_t>> nonempty_subsets(const std::vector<std::size_t>& items) {
  std::vector<std::vector<std::size_t>> out;
  const std::size_t m = items.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t b = 0; b < m; ++b)
      if (mask & (std::size_t{1} << b)) s.push_back(items[b]);
    out.push_back(std::move(s));
  }
  return out;
}

std::string join_sites(const std::vector<std::size_t>& s) {
  std::string out;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k) out += ' ';
    out += std::to_string(s[k] + 1);
  }
  return out;
}

}  // namespace

BiasStudyResult run_bias_study(const BiasStudy& s) {
  BiasStudyResult res;
  const Graph g = five_node_graph();
  const std::size_t d = g.n_nodes();
  res.truth = draw_params(d, g, derive_seed(s.seed, 0));
  res.reps = s.reps;
  // alpha_bias[rep][i][j]
  std::vector<Matrix> ab(s.reps, Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  std::vector<Matrix> bb = ab;
  parallel_for(s.reps, [&](std::size_t rep) {
    const std::uint64_t rs = derive_seed(s.seed, 1, rep);
    for (std::size_t i = 0; i < d; ++i) {
      const Matrix y = gen_scmevm_site(res.truth, i, s.n, kDefaultGenThreshold, derive_seed(rs, i));
      const DependenceParams dep = ht_fit(y, i, kDefaultGenThreshold, derive_seed(rs, 100 + i));
      const DependenceParams tru = res.truth.site_dependence(i);
      const auto others = other_sites(d, i);
      for (std::size_t j = 0; j < others.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        ab[rep](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(others[j])) = dep.alpha[jj] - tru.alpha[jj];
        bb[rep](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(others[j])) = dep.beta[jj] - tru.beta[jj];
      }
    }
  });
  const double nan = std::numeric_limits<double>::quiet_NaN();
  res.median_alpha_bias = Matrix::Constant(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d), nan);
  res.median_beta_bias = res.median_alpha_bias;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d); ++i)
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j) {
      if (i == j) continue;
      std::vector<double> va, vb;
      for (std::size_t rep = 0; rep < s.reps; ++rep) {
        va.push_back(ab[rep](i, j));
        vb.push_back(bb[rep](i, j));
      }
      res.median_alpha_bias(i, j) = median_of(va);
      res.median_beta_bias(i, j) = median_of(vb);
    }
  return res;
}

GraphStudyResult run_graph_study(const GraphStudy& s) {
  GraphStudyResult res;
  res.truth = sixteen_node_graph();
  const EllipticalTruth truth =
      draw_elliptical(EllipticalKind::Gaussian, res.truth, derive_seed(s.seed, 0), s.partials);
  res.true_positives.assign(s.reps, 0);
  res.false_positives.assign(s.reps, 0);
  const double u = laplace_quantile(s.threshold_quantile);
  for (std::size_t rep = 0; rep < s.reps; ++rep) {
    const std::uint64_t rs = derive_seed(s.seed, 1, rep);
    const Matrix x = gen_elliptical(truth, s.n, rs);
    const LaplaceMatrix y = laplace_from_raw(x, 0.95);
    SelectOptions opts;
    opts.seed = derive_seed(rs, 7);
    const GraphSelectionReport rep_out = select_graph(y.values, {u}, s.rho_grid, opts);
    for (const auto& e : rep_out.final_graph.edges()) {
      if (res.truth.has_edge(e.first, e.second)) ++res.true_positives[rep];
      else ++res.false_positives[rep];
    }
  }
  std::vector<double> tp(res.true_positives.begin(), res.true_positives.end());
  std::vector<double> fp(res.false_positives.begin(), res.false_positives.end());
  res.median_true_positives = median_of(tp);
  res.median_false_positives = median_of(fp);
  return res;
}

StructureStudyResult run_structure_study(const StructureStudy& s) {
  StructureStudyResult res;
  const Graph g = five_node_graph();
  const std::size_t d = g.n_nodes();
  const ScmevmTruth truth = draw_params(d, g, derive_seed(s.seed, 0));
  for (std::size_t i = 0; i < d; ++i) {
    const Matrix y = gen_scmevm_site(truth, i, s.n, kDefaultGenThreshold, derive_seed(s.seed, 1, i));
    StepwiseOptions opts;
    opts.seed = derive_seed(s.seed, 2, i);
    const ConditionalFit fg = fit_three_step(y, i, kDefaultGenThreshold, Structure::graphical(g), opts);
    const ConditionalFit fs = fit_three_step(y, i, kDefaultGenThreshold, Structure::saturated(), opts);
    res.max_abs_precision_diff.push_back(
        (fg.residual.precision - fs.residual.precision).cwiseAbs().maxCoeff());
    const Graph sub = remove_node(g, i);
    res.zero_pattern_ok.push_back(graph_from_precision(fg.residual.precision, 0.0) == sub);
    res.loglik_graphical.push_back(fg.loglik);
    res.loglik_saturated.push_back(fs.loglik);
  }
  return res;
}

PredictionStudyResult run_prediction_study(const PredictionStudy& s) {
  const Graph g = five_node_graph();
  const std::size_t d = g.n_nodes();
  const EllipticalTruth truth = draw_elliptical(EllipticalKind::Gaussian, g, derive_seed(s.seed, 0));
  std::vector<double> v(d);
  for (std::size_t j = 0; j < d; ++j) v[j] = elliptical_marginal_quantile(truth, j, s.prediction_quantile);

  PredictionStudyResult res;
  std::vector<std::vector<std::vector<std::size_t>>> sets(d);
  for (std::size_t i = 0; i < d; ++i) {
    sets[i] = nonempty_subsets(other_sites(d, i));
    for (const auto& a : sets[i]) {
      PredictionEvent ev;
      ev.site = i;
      ev.set = a;
      res.events.push_back(ev);
    }
  }

  // Brute-force truth from a large generator sample.
  {
    const Matrix big = gen_elliptical(truth, s.n_truth, derive_seed(s.seed, 1));
    std::size_t e = 0;
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<Eigen::Index> cond;
      for (Eigen::Index r = 0; r < big.rows(); ++r)
        if (big(r, static_cast<Eigen::Index>(i)) > v[i]) cond.push_back(r);
      for (const auto& a : sets[i]) {
        std::size_t hits = 0;
        for (Eigen::Index r : cond) {
          bool all = true;
          for (std::size_t j : a) all = all && big(r, static_cast<Eigen::Index>(j)) > v[j];
          if (all) ++hits;
        }
        const double nc = static_cast<double>(cond.size());
        PredictionEvent& ev = res.events[e++];
        ev.truth = static_cast<double>(hits) / nc;
        ev.truth_se = std::sqrt(ev.truth * (1.0 - ev.truth) / nc);
      }
    }
  }

  const std::size_t n_events = res.events.size();
  std::vector<std::vector<double>> est(s.reps, std::vector<double>(n_events, 0.0));
  FitConfig cfg;
  cfg.marginal_quantile = s.marginal_quantile;
  cfg.dependence_quantile = s.dependence_quantile;
  cfg.structure = Structure::graphical(g);
  cfg.method = FitMethod::ThreeStep;
  for (std::size_t rep = 0; rep < s.reps; ++rep) {
    const std::uint64_t rs = derive_seed(s.seed, 2, rep);
    const Matrix x = gen_elliptical(truth, s.n, rs);
    FitConfig c = cfg;
    c.seed = derive_seed(rs, 1);
    const ScmevmModel model = fit_model(x, c);
    std::size_t e = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const double level = to_laplace(marginal_cdf(model.margins[i], v[i]));
      const Matrix y = conditional_sample(model.fits[i], d, level, s.n_sim, derive_seed(rs, 2, i));
      std::vector<double> lap(d);
      for (std::size_t j = 0; j < d; ++j) lap[j] = to_laplace(marginal_cdf(model.margins[j], v[j]));
      for (const auto& a : sets[i]) {
        std::size_t hits = 0;
        for (Eigen::Index r = 0; r < y.rows(); ++r) {
          bool all = true;
          for (std::size_t j : a) all = all && y(r, static_cast<Eigen::Index>(j)) > lap[j];
          if (all) ++hits;
        }
        est[rep][e++] = static_cast<double>(hits) / static_cast<double>(s.n_sim);
      }
    }
  }

  std::size_t within = 0;
  for (std::size_t e = 0; e < n_events; ++e) {
    PredictionEvent& ev = res.events[e];
    double mean = 0.0;
    for (std::size_t rep = 0; rep < s.reps; ++rep) mean += est[rep][e];
    mean /= static_cast<double>(s.reps);
    double var = 0.0;
    for (std::size_t rep = 0; rep < s.reps; ++rep) var += (est[rep][e] - mean) * (est[rep][e] - mean);
    var = s.reps > 1 ? var / static_cast<double>(s.reps - 1) : 0.0;
    ev.mean_estimate = mean;
    ev.sd_estimate = std::sqrt(var);
    ev.combined_se = std::sqrt(var / static_cast<double>(s.reps) + ev.truth_se * ev.truth_se);
    ev.within_two_se = std::fabs(mean - ev.truth) <= 2.0 * ev.combined_se;
    if (ev.within_two_se) ++within;
  }
  res.fraction_within = static_cast<double>(within) / static_cast<double>(n_events);
  return res;
}

std::vector<std::string> known_studies() { return {"s41_bias", "s42_graph", "s43_mixture-lite", "supp_mvg"}; }

std::string run_named_study(const std::string& id, const std::string& out_dir, std::size_t reps,
                            std::uint64_t seed) {
  std::ostringstream summary;
  const std::string base = out_dir + "/" + id;
  if (id == "s41_bias") {
    BiasStudy s;
    if (reps) s.reps = reps;
    s.seed = seed;
    const BiasStudyResult r = run_bias_study(s);
    std::string csv = "site,variable,median_alpha_bias,median_beta_bias\n";
    double worst = 0.0;
    for (Eigen::Index i = 0; i < r.median_alpha_bias.rows(); ++i)
      for (Eigen::Index j = 0; j < r.median_alpha_bias.cols(); ++j) {
        if (i == j) continue;
        csv += std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
               format_double(r.median_alpha_bias(i, j)) + "," + format_double(r.median_beta_bias(i, j)) + "\n";
        worst = std::max({worst, std::fabs(r.median_alpha_bias(i, j)), std::fabs(r.median_beta_bias(i, j))});
      }
    write_text_file(base + ".csv", csv);
    summary << id << ": max |median bias| = " << format_double(worst) << " over " << r.reps << " replicates";
  } else if (id == "s42_graph") {
    GraphStudy s;
    if (reps) s.reps = reps;
    s.seed = seed;
    const GraphStudyResult r = run_graph_study(s);
    std::string csv = "replicate,true_positives,false_positives\n";
    for (std::size_t k = 0; k < r.true_positives.size(); ++k)
      csv += std::to_string(k + 1) + "," + std::to_string(r.true_positives[k]) + "," +
             std::to_string(r.false_positives[k]) + "\n";
    write_text_file(base + ".csv", csv);
    write_json_file(base + "_truth.json", graph_to_json(r.truth));
    summary << id << ": median true positives " << format_double(r.median_true_positives) << "/"
            << r.truth.edge_count() << ", median false positives " << format_double(r.median_false_positives);
  } else if (id == "s43_mixture-lite") {
    StructureStudy s;
    s.seed = seed;
    const StructureStudyResult r = run_structure_study(s);
    std::string csv = "site,max_abs_precision_diff,zero_pattern_ok,loglik_graphical,loglik_saturated\n";
    double worst = 0.0;
    for (std::size_t k = 0; k < r.max_abs_precision_diff.size(); ++k) {
      csv += std::to_string(k + 1) + "," + format_double(r.max_abs_precision_diff[k]) + "," +
             (r.zero_pattern_ok[k] ? "1" : "0") + "," + format_double(r.loglik_graphical[k]) + "," +
             format_double(r.loglik_saturated[k]) + "\n";
      worst = std::max(worst, r.max_abs_precision_diff[k]);
    }
    write_text_file(base + ".csv", csv);
    summary << id << ": max |graphical - saturated| precision entry = " << format_double(worst);
  } else if (id == "supp_mvg") {
    PredictionStudy s;
    if (reps) s.reps = reps;
    s.seed = seed;
    const PredictionStudyResult r = run_prediction_study(s);
    std::string csv = "site,set,truth,truth_se,mean_estimate,sd_estimate,combined_se,within_two_se\n";
    for (const auto& ev : r.events)
      csv += std::to_string(ev.site + 1) + "," + join_sites(ev.set) + "," + format_double(ev.truth) + "," +
             format_double(ev.truth_se) + "," + format_double(ev.mean_estimate) + "," +
             format_double(ev.sd_estimate) + "," + format_double(ev.combined_se) + "," +
             (ev.within_two_se ? "1" : "0") + "\n";
    write_text_file(base + ".csv", csv);
    summary << id << ": " << format_double(r.fraction_within) << " of " << r.events.size()
            << " events within 2 standard errors";
  } else {
    std::string known;
    for (const auto& k : known_studies()) known += (known.empty() ? "" : ", ") + k;
    throw Error(ErrorKind::InvalidArgument, "unknown study '" + id + "'; known: " + known);
  }
  return summary.str();
}

}  // namespace extgraph
