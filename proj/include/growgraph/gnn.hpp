#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "growgraph/linalg.hpp"
#include "growgraph/params.hpp"

namespace growgraph {

/// sum_k S^k X H_k, computed by repeated shifting (Z_0 = X, Z_k = S Z_{k-1}).
Matrix filter_apply(const Matrix& gso, const Matrix& x, std::span<const Matrix> taps);

/// Intermediate values of one forward pass, enough for an exact reverse pass.
struct ForwardCache {
  struct Layer {
    std::vector<Matrix> shifted;  ///< S^k X_{l-1}, k = 0..K-1 (shifted[0] is the layer input)
    Matrix pre;                   ///< sum_k S^k X_{l-1} H_lk
    Matrix out;                   ///< rho(pre)
  };
  std::vector<Layer> layers;
  Eigen::Index nodes = 0;
};

struct ForwardResult {
  Matrix y;
  ForwardCache cache;
};

/// X_l = rho_l(sum_k S^k X_{l-1} H_lk), l = 1..L; Y = X_L.
ForwardResult gnn_forward(const ParamTensor& params, const Matrix& gso, const Matrix& x,
                          const ActivationPlan& plan);
/// Same values as gnn_forward(...).y without keeping the cache.
Matrix gnn_output(const ParamTensor& params, const Matrix& gso, const Matrix& x,
                  const ActivationPlan& plan);

/// Gradient of <dY, Y> with respect to every H_lk, by reverse accumulation through `cache`.
/// Throws ConsistencyError if the cache does not match params, gso or dY.
ParamTensor gnn_backward(const ForwardCache& cache, const Matrix& gso, const Matrix& dy,
                         const ParamTensor& params, const ActivationPlan& plan);

/// Frobenius norm of the Jacobian dY/dH (one reverse pass per output entry).
double jacobian_norm(const ParamTensor& params, const Matrix& gso, const Matrix& x,
                     const ActivationPlan& plan);

/// h(lambda) = sum_k h_k lambda^k by Horner's rule.
double spectral_response(std::span<const double> taps, double lambda);

/// Rescales, per layer and (input, output) feature pair, the taps whose absolute sum exceeds
/// 1 - margin down to exactly 1 - margin. Afterwards sup_{|lambda|<=1} |h(lambda)| <= 1 - margin.
ParamTensor project_nonamplifying(ParamTensor params, double margin);

/// F^(2L) sqrt(K): bound on the norm of the network gradient w.r.t. its parameters.
double grad_norm_bound(std::size_t layers, std::size_t features, std::size_t taps);

/// I.i.d. uniform on [-a, a], a = 1 / (K max(F_in, F_out)) per layer, then projected with
/// `margin` so the filters start non-amplifying.
ParamTensor init_params(std::size_t taps, const std::vector<std::size_t>& dims, std::uint64_t seed,
                        double margin = 1e-3);

}  // namespace growgraph
