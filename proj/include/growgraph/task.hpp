#pragma once

#include <cstdint>

#include "growgraph/dataset.hpp"

namespace growgraph {

/// Source of training data at any graph size.
class Task {
 public:
  virtual ~Task() = default;

  virtual std::size_t input_features() const = 0;
  virtual std::size_t output_features() const = 0;

  /// Samples for one epoch at graph size n. Graphs are drawn fresh for each epoch index.
  virtual Dataset epoch_dataset(std::size_t n, std::size_t epoch) const = 0;

  /// Whether probe() is available (graphon-backed tasks only).
  virtual bool supports_probe() const { return false; }
  /// One (graph, input, target) draw at size n. The input signal depends only on trial_seed and
  /// the graph only on (trial_seed, n), so two sizes in the same trial share the signal and
  /// equal sizes share the graph.
  virtual Sample probe(std::size_t n, std::uint64_t trial_seed) const;
};

}  // namespace growgraph
