#include "growgraph/graph.hpp"

#include <algorithm>
#include <stdexcept>

#include "growgraph/random.hpp"

namespace growgraph {

SampledGraph::SampledGraph(Matrix adjacency, GraphKind kind)
    : adjacency_(std::move(adjacency)), kind_(kind) {
  if (adjacency_.rows() != adjacency_.cols()) {
    throw std::invalid_argument("adjacency must be square");
  }
  const Eigen::Index n = adjacency_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency_(i, i) != 0.0) throw std::invalid_argument("adjacency diagonal must be zero");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double a = adjacency_(i, j);
      if (a != adjacency_(j, i)) throw std::invalid_argument("adjacency must be symmetric");
      if (kind_ == GraphKind::Stochastic ? (a != 0.0 && a != 1.0) : !(a >= 0.0 && a <= 1.0)) {
        throw std::invalid_argument("adjacency entry out of range for graph kind");
      }
    }
  }
}

Matrix SampledGraph::gso() const {
  if (adjacency_.rows() == 0) return adjacency_;
  return adjacency_ / static_cast<double>(adjacency_.rows());
}

StepGraphon::StepGraphon(Matrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols() || values_.rows() == 0) {
    throw std::invalid_argument("step graphon values must be a non-empty square matrix");
  }
  if (!values_.isApprox(values_.transpose(), 0.0)) {
    throw std::invalid_argument("step graphon values must be symmetric");
  }
}

double StepGraphon::operator()(double u, double v) const {
  const auto n = blocks();
  return values_(static_cast<Eigen::Index>(block_index(u, n)),
                 static_cast<Eigen::Index>(block_index(v, n)));
}

std::size_t block_index(double u, std::size_t n) noexcept {
  const auto b = static_cast<std::size_t>(std::max(0.0, u) * static_cast<double>(n));
  return std::min(b, n - 1);
}

SampledGraph template_graph(const Graphon& graphon, std::size_t n) {
  if (n == 0) throw std::invalid_argument("template_graph: n must be at least 1");
  const auto m = static_cast<Eigen::Index>(n);
  Matrix a = Matrix::Zero(m, m);
  const double scale = 1.0 / static_cast<double>(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double w = graphon(static_cast<double>(i) * scale, static_cast<double>(j) * scale);
      a(i, j) = w;
      a(j, i) = w;
    }
  }
  return SampledGraph(std::move(a), GraphKind::Template);
}

SampledGraph sample_stochastic(const SampledGraph& tmpl, std::uint64_t seed) {
  if (tmpl.kind() != GraphKind::Template) {
    throw std::invalid_argument("sample_stochastic: expected a template graph");
  }
  const Matrix& p = tmpl.adjacency();
  const Eigen::Index n = p.rows();
  Matrix a = Matrix::Zero(n, n);
  Rng rng = make_rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      // uniform01 is in [0,1), so p = 1 always fires and p = 0 never does.
      const double edge = uniform01(rng) < p(i, j) ? 1.0 : 0.0;
      a(i, j) = edge;
      a(j, i) = edge;
    }
  }
  return SampledGraph(std::move(a), GraphKind::Stochastic);
}

SampledGraph sample_graph(const Graphon& graphon, std::size_t n, std::uint64_t seed) {
  return sample_stochastic(template_graph(graphon, n), seed);
}

StepGraphon induced_step(const SampledGraph& graph) {
  if (graph.size() == 0) throw std::invalid_argument("induced_step: empty graph");
  return StepGraphon(graph.adjacency());
}

StepGraphon template_step(const Graphon& graphon, std::size_t n) {
  if (n == 0) throw std::invalid_argument("template_step: n must be at least 1");
  const auto m = static_cast<Eigen::Index>(n);
  const double scale = 1.0 / static_cast<double>(n);
  Matrix v(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      v(i, j) = v(j, i) = graphon(static_cast<double>(i) * scale, static_cast<double>(j) * scale);
    }
  }
  return StepGraphon(std::move(v));
}

GraphonSignal induced_step_signal(const Vector& values) { return GraphonSignal::step(values); }

}  // namespace growgraph
