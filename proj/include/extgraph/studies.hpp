#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "extgraph/gaussgraph.hpp"
#include "extgraph/numeric.hpp"
#include "extgraph/synthgen.hpp"

namespace extgraph {

// Parameter recovery for the normalisation parameters on the five-node graph.
struct BiasStudy {
  std::size_t reps = 50;
  std::size_t n = 500;
  std::uint64_t seed = 41;
};

struct BiasStudyResult {
  ScmevmTruth truth;
  // Entry (i, j) is the median over replicates of the estimate minus truth for
  // variable j given site i; the diagonal is NaN.
  Matrix median_alpha_bias;
  Matrix median_beta_bias;
  std::size_t reps = 0;
};

BiasStudyResult run_bias_study(const BiasStudy& s);

// Graph recovery from Gaussian data on the sixteen-node graph.
struct GraphStudy {
  std::size_t reps = 20;
  std::size_t n = 1000;
  double threshold_quantile = 0.90;
  std::vector<double> rho_grid = {0.20, 0.21, 0.22, 0.23, 0.24, 0.25, 0.26, 0.27, 0.28, 0.29, 0.30};
  PartialRange partials{0.2, 0.4};
  std::uint64_t seed = 42;
};

struct GraphStudyResult {
  Graph truth;
  std::vector<std::size_t> true_positives;
  std::vector<std::size_t> false_positives;
  double median_true_positives = 0.0;
  double median_false_positives = 0.0;
};

GraphStudyResult run_graph_study(const GraphStudy& s);

// Graphical versus saturated residual precision on generator data.
struct StructureStudy {
  std::size_t n = 4000;
  std::uint64_t seed = 43;
};

struct StructureStudyResult {
  std::vector<double> max_abs_precision_diff;  // per site
  std::vector<bool> zero_pattern_ok;           // graphical zeros match remove_node(graph, i)
  std::vector<double> loglik_graphical;
  std::vector<double> loglik_saturated;
};

StructureStudyResult run_structure_study(const StructureStudy& s);

// Conditional tail probabilities on Gaussian data versus generator truth.
struct PredictionStudy {
  std::size_t reps = 50;
  std::size_t n = 5000;
  double dependence_quantile = 0.90;
  double marginal_quantile = 0.90;
  double prediction_quantile = 0.95;
  std::size_t n_sim = 20000;
  std::size_t n_truth = 1000000;
  std::uint64_t seed = 44;
};

struct PredictionEvent {
  std::size_t site = 0;
  std::vector<std::size_t> set;
  double truth = 0.0;
  double truth_se = 0.0;
  double mean_estimate = 0.0;
  double sd_estimate = 0.0;
  double combined_se = 0.0;
  bool within_two_se = false;
};

struct PredictionStudyResult {
  std::vector<PredictionEvent> events;
  double fraction_within = 0.0;
};

PredictionStudyResult run_prediction_study(const PredictionStudy& s);

std::vector<std::string> known_studies();

// Writes the study tables into out_dir; returns a short summary line.
std::string run_named_study(const std::string& id, const std::string& out_dir, std::size_t reps,
                            std::uint64_t seed);

}  // namespace extgraph
