#pragma once

#include <optional>
#include <vector>

#include "growgraph/linalg.hpp"

namespace growgraph {

/// Eigenvalue summary of one GSO, or of a (reference, graph) pair of GSOs.
struct SpectralSummary {
  std::vector<double> eigenvalues;  ///< of the graph operator, sorted descending
  double c = 0.0;
  std::size_t band_cardinality = 0;  ///< #{i : |lambda_i| >= c}
  /// Only set for pairs. min over i with |lambda_i(graph)| >= c of
  /// min_{j != i} |lambda_i(graph) - lambda_j(reference)|, indices taken after a descending
  /// sort of each spectrum. +inf when no index qualifies.
  std::optional<double> eigenvalue_margin;
  std::optional<Matrix> eigenvectors;  ///< columns aligned with `eigenvalues`
};

/// Descending eigenvalues of a symmetric matrix. Throws std::invalid_argument if asymmetric.
std::vector<double> sorted_eigenvalues(const Matrix& symmetric);

/// Band cardinality and eigenvalues come from `graph` (the second operand when given;
/// reference = limit object, graph = sampled operator).
SpectralSummary spectral_summary(const Matrix& gso, double c, bool with_eigenvectors = false);
SpectralSummary spectral_summary(const Matrix& reference_gso, const Matrix& graph_gso, double c,
                                 bool with_eigenvectors = false);

}  // namespace growgraph
