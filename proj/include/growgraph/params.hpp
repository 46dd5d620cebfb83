#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "growgraph/linalg.hpp"

namespace growgraph {

enum class Activation { Tanh, Identity, ReLU };

double activate(Activation act, double x) noexcept;
double activation_derivative(Activation act, double x) noexcept;
std::string to_string(Activation act);
/// "tanh", "identity" or "relu"; throws ConfigError otherwise.
Activation activation_from_string(const std::string& name);

/// Nonlinearity per layer: `hidden` everywhere, optionally Identity on the last layer.
struct ActivationPlan {
  Activation hidden = Activation::Tanh;
  bool identity_readout = false;

  Activation at(std::size_t layer, std::size_t layers) const noexcept {
    return (identity_readout && layer + 1 == layers) ? Activation::Identity : hidden;
  }
};

/// Filter-coefficient tensor {H_lk}: for each layer l and tap k an F_{l-1} x F_l matrix.
/// Independent of graph size.
class ParamTensor {
 public:
  ParamTensor() = default;
  /// Zero-initialised; dims = (F_0, ..., F_L) with L >= 1 and all F > 0, taps >= 1.
  ParamTensor(std::size_t taps, std::vector<std::size_t> dims);

  std::size_t layers() const noexcept { return dims_.empty() ? 0 : dims_.size() - 1; }
  std::size_t taps() const noexcept { return taps_; }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  /// max over all F_l, the "F" of the bound constants.
  std::size_t max_width() const noexcept;

  Matrix& tap(std::size_t layer, std::size_t k) { return coeffs_[layer * taps_ + k]; }
  const Matrix& tap(std::size_t layer, std::size_t k) const { return coeffs_[layer * taps_ + k]; }
  std::span<const Matrix> layer_taps(std::size_t layer) const {
    return std::span<const Matrix>(coeffs_).subspan(layer * taps_, taps_);
  }

  /// Sum over layers of K * F_{l-1} * F_l.
  std::size_t parameter_count() const noexcept;
  double squared_norm() const noexcept;
  double norm() const noexcept;
  bool all_finite() const noexcept;
  bool same_shape(const ParamTensor& other) const noexcept;

  /// Row-major per H_lk, in (l, k) order.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  ParamTensor& operator+=(const ParamTensor& rhs);
  ParamTensor& operator-=(const ParamTensor& rhs);
  ParamTensor& operator*=(double s);
  friend ParamTensor operator-(ParamTensor lhs, const ParamTensor& rhs) { return lhs -= rhs; }
  friend bool operator==(const ParamTensor& a, const ParamTensor& b);

 private:
  std::size_t taps_ = 0;
  std::vector<std::size_t> dims_;
  std::vector<Matrix> coeffs_;
};

}  // namespace growgraph
