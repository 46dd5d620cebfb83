#include "growgraph/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "growgraph/errors.hpp"
#include "growgraph/random.hpp"

namespace growgraph {

// ---------------------------------------------------------------------------------------------
// Activations

double activate(Activation act, double x) noexcept {
  switch (act) {
    case Activation::Tanh:
      return std::tanh(x);
    case Activation::ReLU:
      return x > 0.0 ? x : 0.0;
    case Activation::Identity:
      break;
  }
  return x;
}

double activation_derivative(Activation act, double x) noexcept {
  switch (act) {
    case Activation::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::ReLU:
      return x > 0.0 ? 1.0 : 0.0;
    case Activation::Identity:
      break;
  }
  return 1.0;
}

std::string to_string(Activation act) {
  switch (act) {
    case Activation::Tanh:
      return "tanh";
    case Activation::ReLU:
      return "relu";
    case Activation::Identity:
      break;
  }
  return "identity";
}

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::ReLU;
  if (name == "identity") return Activation::Identity;
  throw ConfigError("unknown activation '" + name + "'");
}

// ---------------------------------------------------------------------------------------------
// ParamTensor

ParamTensor::ParamTensor(std::size_t taps, std::vector<std::size_t> dims)
    : taps_(taps), dims_(std::move(dims)) {
  if (taps_ == 0) throw std::invalid_argument("ParamTensor: K must be >= 1");
  if (dims_.size() < 2) throw std::invalid_argument("ParamTensor: need at least one layer");
  if (std::find(dims_.begin(), dims_.end(), 0u) != dims_.end()) {
    throw std::invalid_argument("ParamTensor: feature counts must be positive");
  }
  coeffs_.reserve(layers() * taps_);
  for (std::size_t l = 0; l < layers(); ++l) {
    for (std::size_t k = 0; k < taps_; ++k) {
      coeffs_.push_back(Matrix::Zero(static_cast<Eigen::Index>(dims_[l]),
                                     static_cast<Eigen::Index>(dims_[l + 1])));
    }
  }
}

std::size_t ParamTensor::max_width() const noexcept {
  return dims_.empty() ? 0 : *std::max_element(dims_.begin(), dims_.end());
}

std::size_t ParamTensor::parameter_count() const noexcept {
  std::size_t count = 0;
  for (std::size_t l = 0; l < layers(); ++l) count += taps_ * dims_[l] * dims_[l + 1];
  return count;
}

double ParamTensor::squared_norm() const noexcept {
  double s = 0.0;
  for (const auto& h : coeffs_) s += h.squaredNorm();
  return s;
}

double ParamTensor::norm() const noexcept { return std::sqrt(squared_norm()); }

bool ParamTensor::all_finite() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Matrix& h) { return h.allFinite(); });
}

bool ParamTensor::same_shape(const ParamTensor& other) const noexcept {
  return taps_ == other.taps_ && dims_ == other.dims_;
}

std::vector<double> ParamTensor::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& h : coeffs_) {
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
      for (Eigen::Index c = 0; c < h.cols(); ++c) flat.push_back(h(r, c));
    }
  }
  return flat;
}

void ParamTensor::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw std::invalid_argument("ParamTensor::assign: wrong number of values");
  }
  std::size_t pos = 0;
  for (auto& h : coeffs_) {
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
      for (Eigen::Index c = 0; c < h.cols(); ++c) h(r, c) = flat[pos++];
    }
  }
}

ParamTensor& ParamTensor::operator+=(const ParamTensor& rhs) {
  if (!same_shape(rhs)) throw std::invalid_argument("ParamTensor: shape mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

ParamTensor& ParamTensor::operator-=(const ParamTensor& rhs) {
  if (!same_shape(rhs)) throw std::invalid_argument("ParamTensor: shape mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

ParamTensor& ParamTensor::operator*=(double s) {
  for (auto& h : coeffs_) h *= s;
  return *this;
}

bool operator==(const ParamTensor& a, const ParamTensor& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i] != b.coeffs_[i]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------------------------
// Filters and networks

namespace {

void check_gso(const Matrix& gso, const Matrix& x) {
  if (gso.rows() != gso.cols()) throw std::invalid_argument("GSO must be square");
  if (gso.rows() != x.rows()) throw std::invalid_argument("GSO and signal disagree on node count");
}

Matrix apply_activation(Activation act, const Matrix& pre) {
  if (act == Activation::Identity) return pre;
  return pre.unaryExpr([act](double v) { return activate(act, v); });
}

}  // namespace

Matrix filter_apply(const Matrix& gso, const Matrix& x, std::span<const Matrix> taps) {
  check_gso(gso, x);
  if (taps.empty()) throw std::invalid_argument("filter_apply: need at least one tap");
  for (const auto& h : taps) {
    if (h.rows() != x.cols() || h.cols() != taps.front().cols()) {
      throw std::invalid_argument("filter_apply: tap shape mismatch");
    }
  }
  Matrix z = x;
  Matrix out = z * taps[0];
  for (std::size_t k = 1; k < taps.size(); ++k) {
    z = gso * z;
    out.noalias() += z * taps[k];
  }
  return out;
}

ForwardResult gnn_forward(const ParamTensor& params, const Matrix& gso, const Matrix& x,
                          const ActivationPlan& plan) {
  check_gso(gso, x);
  if (params.layers() == 0) throw std::invalid_argument("gnn_forward: empty parameter tensor");
  if (static_cast<std::size_t>(x.cols()) != params.dims().front()) {
    throw std::invalid_argument("gnn_forward: input feature count mismatch");
  }
  ForwardResult r;
  r.cache.nodes = x.rows();
  r.cache.layers.resize(params.layers());
  const Matrix* input = &x;
  for (std::size_t l = 0; l < params.layers(); ++l) {
    auto& layer = r.cache.layers[l];
    layer.shifted.reserve(params.taps());
    layer.shifted.push_back(*input);
    layer.pre = layer.shifted[0] * params.tap(l, 0);
    for (std::size_t k = 1; k < params.taps(); ++k) {
      layer.shifted.push_back(gso * layer.shifted[k - 1]);
      layer.pre.noalias() += layer.shifted[k] * params.tap(l, k);
    }
    layer.out = apply_activation(plan.at(l, params.layers()), layer.pre);
    input = &layer.out;
  }
  r.y = r.cache.layers.back().out;
  return r;
}

Matrix gnn_output(const ParamTensor& params, const Matrix& gso, const Matrix& x,
                  const ActivationPlan& plan) {
  check_gso(gso, x);
  if (static_cast<std::size_t>(x.cols()) != params.dims().front()) {
    throw std::invalid_argument("gnn_output: input feature count mismatch");
  }
  Matrix h = x;
  for (std::size_t l = 0; l < params.layers(); ++l) {
    h = apply_activation(plan.at(l, params.layers()), filter_apply(gso, h, params.layer_taps(l)));
  }
  return h;
}

ParamTensor gnn_backward(const ForwardCache& cache, const Matrix& gso, const Matrix& dy,
                         const ParamTensor& params, const ActivationPlan& plan) {
  const std::size_t layers = params.layers();
  if (cache.layers.size() != layers || gso.rows() != cache.nodes || gso.cols() != cache.nodes) {
    throw ConsistencyError("gnn_backward: cache does not match parameters or GSO");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& layer = cache.layers[l];
    if (layer.shifted.size() != params.taps() ||
        static_cast<std::size_t>(layer.shifted[0].cols()) != params.dims()[l] ||
        static_cast<std::size_t>(layer.pre.cols()) != params.dims()[l + 1] ||
        layer.pre.rows() != cache.nodes) {
      throw ConsistencyError("gnn_backward: stale cache (shape drift)");
    }
  }
  const auto& last = cache.layers.back();
  if (dy.rows() != last.out.rows() || dy.cols() != last.out.cols()) {
    throw ConsistencyError("gnn_backward: dY does not match the cached output");
  }

  ParamTensor grad(params.taps(), params.dims());
  Matrix upstream = dy;  // dLoss / dX_l
  for (std::size_t l = layers; l-- > 0;) {
    const auto& layer = cache.layers[l];
    const Activation act = plan.at(l, layers);
    Matrix delta = act == Activation::Identity
                       ? upstream
                       : Matrix(upstream.cwiseProduct(layer.pre.unaryExpr(
                             [act](double v) { return activation_derivative(act, v); })));
    for (std::size_t k = 0; k < params.taps(); ++k) {
      grad.tap(l, k).noalias() = layer.shifted[k].transpose() * delta;
    }
    if (l == 0) break;
    // sum_k S^k delta H_lk^T, Horner form; S is symmetric so S^T = S.
    Matrix back = delta * params.tap(l, params.taps() - 1).transpose();
    for (std::size_t k = params.taps() - 1; k-- > 0;) {
      back = gso * back;
      back.noalias() += delta * params.tap(l, k).transpose();
    }
    upstream = std::move(back);
  }
  return grad;
}

double jacobian_norm(const ParamTensor& params, const Matrix& gso, const Matrix& x,
                     const ActivationPlan& plan) {
  const auto fwd = gnn_forward(params, gso, x, plan);
  double total = 0.0;
  Matrix seed = Matrix::Zero(fwd.y.rows(), fwd.y.cols());
  for (Eigen::Index i = 0; i < fwd.y.rows(); ++i) {
    for (Eigen::Index f = 0; f < fwd.y.cols(); ++f) {
      seed(i, f) = 1.0;
      total += gnn_backward(fwd.cache, gso, seed, params, plan).squared_norm();
      seed(i, f) = 0.0;
    }
  }
  return std::sqrt(total);
}

double spectral_response(std::span<const double> taps, double lambda) {
  double acc = 0.0;
  for (auto it = taps.rbegin(); it != taps.rend(); ++it) acc = acc * lambda + *it;
  return acc;
}

ParamTensor project_nonamplifying(ParamTensor params, double margin) {
  if (!(margin > 0.0 && margin < 1.0)) {
    throw std::invalid_argument("project_nonamplifying: margin must lie in (0,1)");
  }
  const double cap = 1.0 - margin;
  for (std::size_t l = 0; l < params.layers(); ++l) {
    const auto rows = static_cast<Eigen::Index>(params.dims()[l]);
    const auto cols = static_cast<Eigen::Index>(params.dims()[l + 1]);
    for (Eigen::Index g = 0; g < rows; ++g) {
      for (Eigen::Index f = 0; f < cols; ++f) {
        double s = 0.0;
        for (std::size_t k = 0; k < params.taps(); ++k) s += std::abs(params.tap(l, k)(g, f));
        if (s <= cap) continue;
        const double scale = cap / s;
        for (std::size_t k = 0; k < params.taps(); ++k) params.tap(l, k)(g, f) *= scale;
      }
    }
  }
  return params;
}

double grad_norm_bound(std::size_t layers, std::size_t features, std::size_t taps) {
  if (layers < 1 || features < 1 || taps < 1) {
    throw std::invalid_argument("grad_norm_bound: L, F, K must be >= 1");
  }
  return std::pow(static_cast<double>(features), 2.0 * static_cast<double>(layers)) *
         std::sqrt(static_cast<double>(taps));
}

ParamTensor init_params(std::size_t taps, const std::vector<std::size_t>& dims, std::uint64_t seed,
                        double margin) {
  ParamTensor p(taps, dims);
  Rng rng = make_rng(seed);
  for (std::size_t l = 0; l < p.layers(); ++l) {
    const double a = 1.0 / static_cast<double>(taps * std::max(dims[l], dims[l + 1]));
    for (std::size_t k = 0; k < taps; ++k) {
      Matrix& h = p.tap(l, k);
      for (Eigen::Index r = 0; r < h.rows(); ++r) {
        for (Eigen::Index c = 0; c < h.cols(); ++c) h(r, c) = uniform(rng, -a, a);
      }
    }
  }
  return project_nonamplifying(std::move(p), margin);
}

}  // namespace growgraph
