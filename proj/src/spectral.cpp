#include "growgraph/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace growgraph {

namespace {

void check_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("spectral: matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("spectral: matrix must be symmetric");
  }
}

struct Decomposition {
  std::vector<double> values;
  Matrix vectors;
};

Decomposition decompose(const Matrix& m, bool vectors) {
  check_symmetric(m);
  if (m.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(
      m, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
  // Eigen returns ascending order.
  const auto n = m.rows();
  Decomposition d;
  d.values.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d.values[static_cast<std::size_t>(i)] = solver.eigenvalues()[n - 1 - i];
  if (vectors) d.vectors = solver.eigenvectors().rowwise().reverse();
  return d;
}

void check_threshold(double c) {
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("spectral: c must lie in (0,1]");
}

std::size_t band_count(const std::vector<double>& values, double c) {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [c](double l) { return std::abs(l) >= c; }));
}

}  // namespace

std::vector<double> sorted_eigenvalues(const Matrix& symmetric) {
  return decompose(symmetric, false).values;
}

SpectralSummary spectral_summary(const Matrix& gso, double c, bool with_eigenvectors) {
  check_threshold(c);
  auto d = decompose(gso, with_eigenvectors);
  SpectralSummary s;
  s.c = c;
  s.band_cardinality = band_count(d.values, c);
  s.eigenvalues = std::move(d.values);
  if (with_eigenvectors) s.eigenvectors = std::move(d.vectors);
  return s;
}

SpectralSummary spectral_summary(const Matrix& reference_gso, const Matrix& graph_gso, double c,
                                 bool with_eigenvectors) {
  SpectralSummary s = spectral_summary(graph_gso, c, with_eigenvectors);
  const std::vector<double> ref = sorted_eigenvalues(reference_gso);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    if (std::abs(s.eigenvalues[i]) < c) continue;
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (j == i) continue;
      margin = std::min(margin, std::abs(s.eigenvalues[i] - ref[j]));
    }
  }
  s.eigenvalue_margin = margin;
  return s;
}

}  // namespace growgraph
