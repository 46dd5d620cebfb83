#pragma once

#include <memory>
#include <vector>

#include "growgraph/linalg.hpp"

namespace growgraph {

/// One supervised pair on a graph. Samples drawn on the same graph share the GSO.
struct Sample {
  std::shared_ptr<const Matrix> gso;
  Matrix x;  ///< n x F_0
  Matrix y;  ///< n x F_L
};

struct Dataset {
  std::size_t input_features = 0;
  std::size_t output_features = 0;
  std::vector<Sample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  /// Throws std::invalid_argument if any sample disagrees with the declared feature counts
  /// or its own node count.
  void validate() const;
};

}  // namespace growgraph
