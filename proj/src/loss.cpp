#include "growgraph/loss.hpp"

#include <stdexcept>

namespace growgraph {

LossResult loss_and_grad(LossKind kind, const Matrix& y, const Matrix& yhat) {
  if (y.rows() != yhat.rows() || y.cols() != yhat.cols()) {
    throw std::invalid_argument("loss: shape mismatch");
  }
  const double scale =
      kind == LossKind::HalfMeanSquare && y.size() > 0 ? 1.0 / static_cast<double>(y.size()) : 1.0;
  Matrix diff = yhat - y;
  LossResult r;
  r.value = 0.5 * scale * diff.squaredNorm();
  r.d_yhat = scale * diff;
  return r;
}

}  // namespace growgraph
