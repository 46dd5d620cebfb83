#pragma once

// Test-only reference computations. Deliberately naive: explicit matrix powers, central
// finite differences, brute-force pair enumeration. Nothing here calls the code paths they check
// except the plain forward evaluation used by the finite-difference oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;

/// sum_k (S^k) X H_k with S^k formed explicitly.
inline Matrix brute_filter(const Matrix& s, const Matrix& x, const std::vector<Matrix>& taps) {
  Matrix out = Matrix::Zero(x.rows(), taps.front().cols());
  Matrix power = Matrix::Identity(s.rows(), s.cols());
  for (const auto& h : taps) {
    out += power * x * h;
    power = power * s;
  }
  return out;
}

/// Central differences of f at `theta` with step h.
inline std::vector<double> central_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> theta, double h) {
  std::vector<double> g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double keep = theta[i];
    theta[i] = keep + h;
    const double up = f(theta);
    theta[i] = keep - h;
    const double down = f(theta);
    theta[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// min over i with |b_i| >= c of min_{j != i} |b_i - a_j|, by enumeration.
inline double brute_margin(const std::vector<double>& a, const std::vector<double>& b, double c) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!(std::abs(b[i]) >= c)) continue;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (i != j) best = std::min(best, std::abs(b[i] - a[j]));
    }
  }
  return best;
}

/// Random permutation matrix.
inline Matrix permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<int> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<int>(i);
  std::shuffle(p.begin(), p.end(), rng);
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) m(static_cast<Eigen::Index>(i), p[i]) = 1.0;
  return m;
}

/// Random symmetric 0/1 adjacency with zero diagonal.
inline Matrix random_adjacency(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution edge(p);
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      if (edge(rng)) a(i, j) = a(j, i) = 1.0;
    }
  }
  return a;
}

}  // namespace oracle
