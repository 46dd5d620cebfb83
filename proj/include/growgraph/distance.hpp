#pragma once

#include "growgraph/graph.hpp"
#include "growgraph/graphon.hpp"

namespace growgraph {

// L2 distances by the midpoint rule on a uniform grid of grid_m cells per axis. When a step
// object is involved the grid is refined to the next multiple of the block counts (their lcm),
// so step functions are integrated exactly cell by cell.

double l2_graphon_distance(const Graphon& a, const Graphon& b, std::size_t grid_m);
double l2_graphon_distance(const Graphon& a, const StepGraphon& b, std::size_t grid_m);
double l2_graphon_distance(const StepGraphon& a, const Graphon& b, std::size_t grid_m);
double l2_graphon_distance(const StepGraphon& a, const StepGraphon& b, std::size_t grid_m);

double l2_signal_distance(const GraphonSignal& a, const GraphonSignal& b, std::size_t grid_m);

/// The grid actually used: the smallest multiple of lcm(blocks...) that is >= grid_m.
std::size_t refined_grid(std::size_t grid_m, std::size_t blocks_a, std::size_t blocks_b);

}  // namespace growgraph
