#pragma once

#include <Eigen/Dense>

namespace growgraph {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace growgraph
