#pragma once

#include "growgraph/linalg.hpp"

namespace growgraph {

enum class LossKind {
  HalfMeanSquare,  ///< ||y - yhat||_F^2 / (2 numel); 1-Lipschitz gradient
  HalfSquare,      ///< ||y - yhat||_F^2 / 2
};

struct LossResult {
  double value = 0.0;
  Matrix d_yhat;
};

/// Throws std::invalid_argument on shape mismatch.
LossResult loss_and_grad(LossKind kind, const Matrix& y, const Matrix& yhat);

}  // namespace growgraph
