#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "extgraph/agg.hpp"
#include "extgraph/gaussgraph.hpp"
#include "extgraph/margins.hpp"

namespace extgraph {

// Normalisation y_j = alpha_j y_i + y_i^beta_j z_j for the d-1 variables other
// than the conditioning site, plus the Gaussian working-residual moments.
struct DependenceParams {
  Vector alpha;
  Vector beta;
  Vector working_mu;
  Vector working_sigma;
  // Set where the working residual collapsed to zero spread, so beta carries
  // no information.
  std::vector<bool> beta_unidentified;
};

enum class FitMethod { OneStep, TwoStep, ThreeStep };

const char* to_string(FitMethod m);

struct ConditionalFit {
  std::size_t site = 0;
  double threshold = 0.0;
  DependenceParams dep;
  MvaggParams residual;
  std::size_t n_excesses = 0;
  double loglik = 0.0;
  FitMethod method = FitMethod::ThreeStep;
  bool converged = true;
  int iterations = 0;
  bool copula_clamped = false;
  bool at_bound = false;  // some alpha, beta or delta sits on its search bound
  bool ok = true;
  std::string error;
};

struct ScmevmModel {
  std::vector<ConditionalFit> fits;
  Structure structure;
  std::vector<MarginalModel> margins;
  LaplaceMatrix laplace_data;
  bool partial = false;

  std::size_t dim() const { return margins.size(); }
};

// Rows with y_i > u: the conditioning values and the other d-1 columns.
struct ExcessSet {
  Vector yi;
  Matrix others;
};

ExcessSet excess_rows(const Matrix& y, std::size_t i, double u);

// Column indices other than i, in order.
std::vector<std::size_t> other_sites(std::size_t d, std::size_t i);

inline constexpr double kBetaLo = -5.0;
inline constexpr double kBetaHi = 1.0;

DependenceParams ht_fit(const Matrix& y, std::size_t i, double u, std::uint64_t seed = 0);

Matrix residuals(const Matrix& y, std::size_t i, double u, const DependenceParams& dep);

// log L = sum over excess rows of mvagg log-density of z minus sum_j beta_j log y_i.
CopulaEval scmevm_loglik(const Matrix& y, std::size_t i, double u, const DependenceParams& dep,
                         const MvaggParams& residual);

struct StepwiseOptions {
  double tol = 1e-4;
  int max_outer = 50;
  std::uint64_t seed = 0;
  // Starting point for the iterative schemes; when absent the three-step fit
  // on the same data is used.
  std::optional<ConditionalFit> init;
};

ConditionalFit fit_one_step(const Matrix& y, std::size_t i, double u, const Structure& structure,
                            const StepwiseOptions& opts = {});
ConditionalFit fit_two_step(const Matrix& y, std::size_t i, double u, const Structure& structure,
                            const StepwiseOptions& opts = {});
ConditionalFit fit_three_step(const Matrix& y, std::size_t i, double u, const Structure& structure,
                              const StepwiseOptions& opts = {});

ConditionalFit fit_conditional(const Matrix& y, std::size_t i, double u, const Structure& structure,
                               FitMethod method, const StepwiseOptions& opts = {});

struct FitConfig {
  double marginal_quantile = 0.95;
  double dependence_quantile = 0.80;
  // Optional per-site dependence quantiles; overrides dependence_quantile.
  std::vector<double> site_quantiles;
  Structure structure = Structure::saturated();
  FitMethod method = FitMethod::ThreeStep;
  std::uint64_t seed = 1;
};

// Laplace-scale dependence threshold for site i under the config.
double dependence_threshold(const FitConfig& cfg, std::size_t i);

ScmevmModel fit_model(const Matrix& x, const FitConfig& cfg,
                      std::vector<std::string> column_ids = {});

// Conditional fits on data already on Laplace margins.
ScmevmModel fit_model_laplace(const LaplaceMatrix& y, std::vector<MarginalModel> margins,
                              const FitConfig& cfg);

}  // namespace extgraph
