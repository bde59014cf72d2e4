#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "extgraph/numeric.hpp"

namespace extgraph {

struct DependenceCurve {
  std::vector<double> u_grid;
  std::vector<double> values;
  std::vector<double> stderr_values;
};

// Column-wise midrank / (n + 1).
Matrix to_uniform_ranks(const Matrix& x);

struct ChiEstimate {
  double value = 0.0;
  bool no_exceedances = false;
};

// Empirical chi_A(u) on uniform-margin data; columns are the set A.
ChiEstimate chi_u(const Matrix& uniform_data, double u);

// Hill estimate of the coefficient of tail dependence from the minimum of the
// rank-transformed pair, clamped to (0, 1]. Needs at least 50 exceedances.
double eta_u(const Matrix& data, double u);

inline constexpr std::size_t kMinEtaExceedances = 50;

// Estimators taking raw data (ranked internally) and a level u.
using CurveEstimator = std::function<double(const Matrix&, double)>;
double chi_estimator(const Matrix& raw, double u);
double eta_estimator(const Matrix& raw, double u);

DependenceCurve estimate_curve(const Matrix& raw, const CurveEstimator& est,
                               const std::vector<double>& u_grid);

// Row bootstrap: pointwise median and standard deviation over replicates.
// Replicates where the estimator fails at some u are skipped at that u.
DependenceCurve bootstrap_curves(const Matrix& raw, const CurveEstimator& est,
                                 const std::vector<double>& u_grid, std::size_t n_boot,
                                 std::uint64_t seed);

}  // namespace extgraph
