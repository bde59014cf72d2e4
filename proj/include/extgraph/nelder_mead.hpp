#pragma once

#include <functional>
#include <vector>

namespace extgraph {

struct NelderMeadOptions {
  int max_evals = 4000;
  double ftol_abs = 1e-10;
  double ftol_rel = 1e-10;
  double xtol = 1e-8;
  // Initial simplex step per coordinate; a single value is broadcast.
  std::vector<double> step{0.1};
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evals = 0;
  bool converged = false;
};

// Minimises f by the Nelder-Mead simplex method. f may return +inf to mark
// infeasible points; the starting point must be feasible.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts = {});

}  // namespace extgraph
