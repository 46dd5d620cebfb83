#pragma once

#include <cstddef>

#include "growgraph/graphon.hpp"

namespace growgraph {

/// gamma = 12 sqrt(K F^(L-1)) L^2 F^(2L-2), the constant in front of the non-transferable
/// term gamma * c of the gradient-distance bound.
double gamma_constant(std::size_t layers, std::size_t features, std::size_t taps);

struct DegreeConditionResult {
  bool holds = false;
  double d_w = 0.0;         ///< max_v of the integral of W(u,v) du
  bool degenerate = false;  ///< d_w == 0
};

/// Graph-size condition n - log(2n/xi)/d_W > 2/d_W with d_W estimated on a midpoint grid.
DegreeConditionResult degree_condition_check(const Graphon& graphon, std::size_t n, double xi, std::size_t grid_m);

/// Midpoint-rule estimate of max_v of the integral of W(u,v) du.
double max_degree(const Graphon& graphon, std::size_t grid_m);

}  // namespace growgraph
