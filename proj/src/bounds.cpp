#include "growgraph/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace growgraph {

double gamma_constant(std::size_t layers, std::size_t features, std::size_t taps) {
  if (layers < 1 || features < 1 || taps < 1) {
    throw std::invalid_argument("gamma_constant: L, F, K must be >= 1");
  }
  const double l = static_cast<double>(layers);
  const double f = static_cast<double>(features);
  const double k = static_cast<double>(taps);
  return 12.0 * std::sqrt(k * std::pow(f, l - 1.0)) * l * l * std::pow(f, 2.0 * l - 2.0);
}

double max_degree(const Graphon& graphon, std::size_t grid_m) {
  const double h = 1.0 / static_cast<double>(grid_m);
  double best = 0.0;
  for (std::size_t j = 0; j < grid_m; ++j) {
    const double v = (static_cast<double>(j) + 0.5) * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < grid_m; ++i) acc += graphon((static_cast<double>(i) + 0.5) * h, v);
    best = std::max(best, acc * h);
  }
  return best;
}

DegreeConditionResult degree_condition_check(const Graphon& graphon, std::size_t n, double xi, std::size_t grid_m) {
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("degree_condition_check: xi must lie in (0,1)");
  if (grid_m < 16) throw std::invalid_argument("degree_condition_check: grid_m must be >= 16");
  if (n < 1) throw std::invalid_argument("degree_condition_check: n must be >= 1");
  DegreeConditionResult r;
  r.d_w = max_degree(graphon, grid_m);
  if (r.d_w <= 0.0) {
    r.degenerate = true;
    return r;
  }
  const double nn = static_cast<double>(n);
  r.holds = nn - std::log(2.0 * nn / xi) / r.d_w > 2.0 / r.d_w;
  return r;
}

}  // namespace growgraph
