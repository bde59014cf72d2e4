#pragma once

#include <cstdint>
#include <vector>

#include "extgraph/scmevm.hpp"

namespace extgraph {

struct SimulationConfig {
  double u = 0.0;          // common Laplace-scale threshold
  std::size_t n_out = 1000;
  double oversample = 20.0;
  std::uint64_t seed = 1;
};

// Importance-sampling proposals before resampling.
struct TailProposals {
  Matrix laplace_rows;
  std::vector<std::size_t> site;  // conditioning site of each proposal
  std::vector<double> weights;
};

struct SimulatedSample {
  Matrix rows;          // original margins
  Matrix laplace_rows;  // Laplace margins
  std::vector<bool> from_tail;
  std::size_t n_proposals = 0;
  double effective_sample_size = 0.0;
  bool degenerate_weights = false;
  double p_hat = 1.0;  // mixture probability of the tail branch
};

// Draws n rows of Y | Y_i > level from the fitted conditional model of one
// site (level must be at least the fit threshold).
Matrix conditional_sample(const ConditionalFit& fit, std::size_t d, double level, std::size_t n,
                          std::uint64_t seed);

TailProposals propose_tail(const ScmevmModel& model, double u, std::size_t n, std::uint64_t seed);

SimulatedSample simulate_tail(const ScmevmModel& model, const SimulationConfig& cfg);

// Mixture of the tail branch (with probability equal to the empirical share of
// rows whose maximum exceeds u) and resampled empirical rows below u.
SimulatedSample simulate_unconditional(const ScmevmModel& model, const SimulationConfig& cfg,
                                       const LaplaceMatrix& empirical_body);

struct TailEvent {
  std::size_t site = 0;
  double site_level = 0.0;           // original margin
  std::vector<std::size_t> set;      // variables other than site
  std::vector<double> levels;        // original margins, one per entry of set
};

struct TailEstimate {
  double p = 0.0;
  double stderr_mc = 0.0;
  std::size_t n = 0;
};

// P[X_A > v_A | X_i > u_i] by conditional simulation from site i's fit.
TailEstimate tail_probability(const ScmevmModel& model, const TailEvent& event, std::size_t n_sim,
                              std::uint64_t seed);

}  // namespace extgraph
