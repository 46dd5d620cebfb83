#include "growgraph/distance.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace growgraph {

std::size_t refined_grid(std::size_t grid_m, std::size_t blocks_a, std::size_t blocks_b) {
  if (grid_m < 2) throw std::invalid_argument("quadrature grid must have at least 2 cells");
  std::size_t unit = 1;
  if (blocks_a > 0) unit = std::lcm(unit, blocks_a);
  if (blocks_b > 0) unit = std::lcm(unit, blocks_b);
  return ((grid_m + unit - 1) / unit) * unit;
}

namespace {

template <class A, class B>
double kernel_distance(const A& a, const B& b, std::size_t m) {
  const double h = 1.0 / static_cast<double>(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double u = (static_cast<double>(i) + 0.5) * h;
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = (static_cast<double>(j) + 0.5) * h;
      const double d = a(u, v) - b(u, v);
      row += d * d;
    }
    acc += row;
  }
  return std::sqrt(acc * h * h);
}

}  // namespace

double l2_graphon_distance(const Graphon& a, const Graphon& b, std::size_t grid_m) {
  return kernel_distance(a, b, refined_grid(grid_m, 0, 0));
}

double l2_graphon_distance(const Graphon& a, const StepGraphon& b, std::size_t grid_m) {
  return kernel_distance(a, b, refined_grid(grid_m, 0, b.blocks()));
}

double l2_graphon_distance(const StepGraphon& a, const Graphon& b, std::size_t grid_m) {
  return kernel_distance(a, b, refined_grid(grid_m, a.blocks(), 0));
}

double l2_graphon_distance(const StepGraphon& a, const StepGraphon& b, std::size_t grid_m) {
  return kernel_distance(a, b, refined_grid(grid_m, a.blocks(), b.blocks()));
}

double l2_signal_distance(const GraphonSignal& a, const GraphonSignal& b, std::size_t grid_m) {
  const std::size_t m = refined_grid(grid_m, a.blocks(), b.blocks());
  const double h = 1.0 / static_cast<double>(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double u = (static_cast<double>(i) + 0.5) * h;
    const double d = a(u) - b(u);
    acc += d * d;
  }
  return std::sqrt(acc * h);
}

}  // namespace growgraph
