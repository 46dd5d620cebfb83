#pragma once

#include <cstdint>

#include "growgraph/graphon.hpp"
#include "growgraph/linalg.hpp"

namespace growgraph {

enum class GraphKind { Template, Stochastic };

/// Undirected n-node graph with zero diagonal. Template graphs carry weights in [0,1],
/// stochastic graphs carry 0/1 entries.
class SampledGraph {
 public:
  /// Validates symmetry, zero diagonal and the entry range for `kind`.
  SampledGraph(Matrix adjacency, GraphKind kind);

  std::size_t size() const noexcept { return static_cast<std::size_t>(adjacency_.rows()); }
  GraphKind kind() const noexcept { return kind_; }
  const Matrix& adjacency() const noexcept { return adjacency_; }
  /// Graph shift operator A/n. Its spectrum lies in [-1,1].
  Matrix gso() const;

 private:
  Matrix adjacency_;
  GraphKind kind_;
};

/// Piecewise-constant kernel with value values(i,j) on I_i x I_j.
class StepGraphon {
 public:
  explicit StepGraphon(Matrix values);

  std::size_t blocks() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  const Matrix& values() const noexcept { return values_; }
  double operator()(double u, double v) const;

 private:
  Matrix values_;
};

/// Entry (i,j), i != j, is W(u_i, u_j) with u_i = (i-1)/n; the diagonal is zero.
SampledGraph template_graph(const Graphon& graphon, std::size_t n);

/// Draws each i<j edge as Bernoulli(template entry) and mirrors it.
SampledGraph sample_stochastic(const SampledGraph& template_graph, std::uint64_t seed);

/// Shorthand for sample_stochastic(template_graph(graphon, n), seed).
SampledGraph sample_graph(const Graphon& graphon, std::size_t n, std::uint64_t seed);

StepGraphon induced_step(const SampledGraph& graph);
/// The template graphon: W(u_i, u_j) on every block I_i x I_j, diagonal blocks included.
/// Differs from induced_step(template_graph(W, n)) only on the diagonal, which graphs leave empty.
StepGraphon template_step(const Graphon& graphon, std::size_t n);
GraphonSignal induced_step_signal(const Vector& values);

/// Block index of u in the partition I_1..I_n (I_n is closed on the right).
std::size_t block_index(double u, std::size_t n) noexcept;

}  // namespace growgraph
