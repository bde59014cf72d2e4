#include "extgraph/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace extgraph {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  NelderMeadResult res;
  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  fv[0] = eval(x0);
  for (std::size_t i = 0; i < n; ++i) {
    const double step = opts.step.size() == n ? opts.step[i] : opts.step.front();
    simplex[i + 1][i] += step;
    fv[i + 1] = eval(simplex[i + 1]);
    if (!std::isfinite(fv[i + 1])) {
      // Try the opposite direction before giving up on this vertex.
      simplex[i + 1][i] = x0[i] - step;
      fv[i + 1] = eval(simplex[i + 1]);
    }
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  auto point = [&](const std::vector<double>& worst, double t, std::vector<double>& out) {
    for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (worst[k] - centroid[k]);
  };

  bool converged = false;
  while (evals < opts.max_evals) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(),
                      second = order[n - 1];

    double size = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        size = std::max(size, std::fabs(simplex[i][k] - simplex[best][k]));
    const double spread = fv[worst] - fv[best];
    if (std::isfinite(spread) &&
        spread <= opts.ftol_abs + opts.ftol_rel * std::fabs(fv[best]) &&
        size <= opts.xtol * (1.0 + std::sqrt(std::inner_product(
                                        simplex[best].begin(), simplex[best].end(),
                                        simplex[best].begin(), 0.0)))) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    }

    point(simplex[worst], -1.0, xr);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      point(simplex[worst], -2.0, xe);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    point(simplex[worst], outside ? -0.5 : 0.5, xc);
    const double fc = eval(xc);
    if (fc < std::min(fr, fv[worst])) {
      simplex[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k)
        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
      fv[i] = eval(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = simplex[best];
  res.value = fv[best];
  res.evals = evals;
  res.converged = converged && std::isfinite(res.value);
  return res;
}

}  // namespace extgraph
