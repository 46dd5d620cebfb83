#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "growgraph/errors.hpp"
#include "growgraph/gnn.hpp"
#include "growgraph/loss.hpp"
#include "growgraph/params_io.hpp"
#include "oracles.hpp"

using namespace growgraph;

namespace {

Matrix path2_gso() {
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  return a / 2.0;
}

ParamTensor scalar_taps(std::vector<double> h) {
  ParamTensor p(h.size(), {1, 1});
  for (std::size_t k = 0; k < h.size(); ++k) p.tap(0, k)(0, 0) = h[k];
  return p;
}

struct Instance {
  ParamTensor params;
  Matrix gso;
  Matrix x;
};

Instance random_instance(std::mt19937_64& rng, std::size_t max_n = 8) {
  std::uniform_int_distribution<std::size_t> nn(2, max_n), ll(1, 3), ff(1, 4), kk(1, 4);
  const std::size_t n = nn(rng), layers = ll(rng), taps = kk(rng);
  std::vector<std::size_t> dims(layers + 1);
  for (auto& d : dims) d = ff(rng);
  std::normal_distribution<double> g(0.0, 0.7);
  ParamTensor p(taps, dims);
  for (std::size_t l = 0; l < layers; ++l)
    for (std::size_t k = 0; k < taps; ++k) p.tap(l, k) = p.tap(l, k).unaryExpr([&](double) { return g(rng); });
  Matrix s = oracle::random_adjacency(n, 0.5, rng) / static_cast<double>(n);
  Matrix x = Matrix::NullaryExpr(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims[0]),
                                 [&] { return g(rng); });
  return {std::move(p), std::move(s), std::move(x)};
}

}  // namespace

TEST_SUITE("gnn") {

TEST_CASE("filter_apply examples") {
  Matrix x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  Matrix s = Matrix::Constant(3, 3, 0.2);
  const std::vector<Matrix> identity = {Matrix::Identity(2, 2)};
  CHECK(filter_apply(s, x, identity) == x);

  const std::vector<Matrix> shift = {Matrix::Zero(1, 1), Matrix::Ones(1, 1)};
  Matrix e(2, 1);
  e << 1, 0;
  const Matrix y = filter_apply(path2_gso(), e, shift);
  CHECK(y(0, 0) == 0.0);
  CHECK(y(1, 0) == 0.5);

  CHECK(filter_apply(s, Matrix::Zero(3, 2), identity).isZero());
  CHECK_THROWS_AS(filter_apply(s, Matrix::Zero(4, 2), identity), std::invalid_argument);
  CHECK_THROWS_AS(filter_apply(s, x, std::vector<Matrix>{Matrix::Identity(3, 3)}), std::invalid_argument);
}

TEST_CASE("filter_apply matches explicit matrix powers") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> small(1, 6);
  std::uniform_int_distribution<int> digit(-3, 3);
  for (int t = 0; t < 40; ++t) {
    const int n = small(rng), fin = small(rng) % 3 + 1, fout = small(rng) % 3 + 1, k = small(rng) % 4 + 1;
    // small integers over power-of-two n keep every product exactly representable
    Matrix s = oracle::random_adjacency(static_cast<std::size_t>(n), 0.5, rng) / 8.0;
    Matrix x = Matrix::NullaryExpr(n, fin, [&] { return static_cast<double>(digit(rng)); });
    std::vector<Matrix> taps;
    for (int i = 0; i < k; ++i)
      taps.push_back(Matrix::NullaryExpr(fin, fout, [&] { return static_cast<double>(digit(rng)); }));
    CHECK(filter_apply(s, x, taps) == oracle::brute_filter(s, x, taps));
  }
}

TEST_CASE("forward examples") {
  const auto p = scalar_taps({0.0, 1.0});
  Matrix e(2, 1);
  e << 1, 0;
  const Matrix y = gnn_output(p, path2_gso(), e, ActivationPlan{Activation::Tanh, false});
  CHECK(y(0, 0) == 0.0);
  CHECK(y(1, 0) == doctest::Approx(0.462117).epsilon(1e-6));
  CHECK(y(1, 0) == std::tanh(0.5));

  const auto id = scalar_taps({1.0});
  Matrix x(3, 1);
  x << 0.3, -2, 5;
  CHECK(gnn_output(id, Matrix::Constant(3, 3, 0.1), x, ActivationPlan{Activation::Identity, false}) == x);
  CHECK_THROWS_AS(gnn_output(id, Matrix::Zero(2, 2), x, ActivationPlan{}), std::invalid_argument);
}

TEST_CASE("zero input propagates to zero output for every activation") {
  std::mt19937_64 rng(5);
  for (auto act : {Activation::Tanh, Activation::Identity, Activation::ReLU}) {
    CHECK(activate(act, 0.0) == 0.0);
    for (int t = 0; t < 10; ++t) {
      auto inst = random_instance(rng);
      const Matrix zero = Matrix::Zero(inst.x.rows(), inst.x.cols());
      CHECK(gnn_output(inst.params, inst.gso, zero, ActivationPlan{act, false}).isZero(0.0));
    }
  }
}

TEST_CASE("tanh derivative bounds") {
  for (double x = -6.0; x <= 6.0; x += 0.01) {
    CHECK(std::abs(activation_derivative(Activation::Tanh, x)) <= 1.0);
    const double h = 1e-5;
    const double second = (activation_derivative(Activation::Tanh, x + h) -
                           activation_derivative(Activation::Tanh, x - h)) / (2 * h);
    CHECK(std::abs(second) <= 0.77);  // max |tanh''| = 4/(3 sqrt 3)
  }
}

TEST_CASE("cache replays the forward output") {
  std::mt19937_64 rng(8);
  auto inst = random_instance(rng);
  const auto fwd = gnn_forward(inst.params, inst.gso, inst.x, ActivationPlan{});
  CHECK(fwd.cache.layers.back().out == fwd.y);
  CHECK(fwd.y == gnn_output(inst.params, inst.gso, inst.x, ActivationPlan{}));
  for (std::size_t l = 0; l < fwd.cache.layers.size(); ++l) {
    const auto& layer = fwd.cache.layers[l];
    CHECK(static_cast<std::size_t>(layer.shifted.size()) == inst.params.taps());
    CHECK(filter_apply(inst.gso, layer.shifted[0], inst.params.layer_taps(l)) == layer.pre);
  }
}

TEST_CASE("backward examples") {
  const auto p = scalar_taps({1.0});
  Matrix x(2, 1);
  x << 1, 0;
  const Matrix s = path2_gso();
  const ActivationPlan plan{Activation::Identity, false};
  const auto fwd = gnn_forward(p, s, x, plan);
  CHECK(gnn_backward(fwd.cache, s, Matrix::Zero(2, 1), p, plan).squared_norm() == 0.0);

  // The hand chain rule (yhat - y) . x = 1 is the plain half-square loss; the mean-normalised
  // loss divides by numel = 2.
  const Matrix y = Matrix::Zero(2, 1);
  const auto half_sq = loss_and_grad(LossKind::HalfSquare, y, fwd.y);
  CHECK(gnn_backward(fwd.cache, s, half_sq.d_yhat, p, plan).tap(0, 0)(0, 0) == 1.0);
  const auto half_mean = loss_and_grad(LossKind::HalfMeanSquare, y, fwd.y);
  CHECK(gnn_backward(fwd.cache, s, half_mean.d_yhat, p, plan).tap(0, 0)(0, 0) == 0.5);
  const Matrix dy = half_sq.d_yhat;

  auto other = scalar_taps({1.0, 0.0});
  CHECK_THROWS_AS(gnn_backward(fwd.cache, s, dy, other, plan), ConsistencyError);
  CHECK_THROWS_AS(gnn_backward(fwd.cache, Matrix::Zero(3, 3), dy, p, plan), ConsistencyError);
}

TEST_CASE("backward matches central finite differences") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 20; ++t) {
    auto inst = random_instance(rng);
    const ActivationPlan plan{t % 2 ? Activation::Identity : Activation::Tanh, false};
    Matrix target = gnn_output(inst.params, inst.gso, inst.x, plan);
    target = target.unaryExpr([&](double v) { return v + std::normal_distribution<double>(0, 1)(rng); });
    auto objective = [&](const std::vector<double>& theta) {
      ParamTensor q = inst.params;
      q.assign(theta);
      return loss_and_grad(LossKind::HalfMeanSquare, target, gnn_output(q, inst.gso, inst.x, plan)).value;
    };
    const auto fd = oracle::central_gradient(objective, inst.params.flatten(), 1e-6);
    const auto fwd = gnn_forward(inst.params, inst.gso, inst.x, plan);
    const auto lg = loss_and_grad(LossKind::HalfMeanSquare, target, fwd.y);
    const auto bp = gnn_backward(fwd.cache, inst.gso, lg.d_yhat, inst.params, plan).flatten();
    double fd_norm = 0.0;
    for (double v : fd) fd_norm += v * v;
    const double scale = std::max(1.0, std::sqrt(fd_norm));
    double worst = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) worst = std::max(worst, std::abs(bp[i] - fd[i]) / scale);
    CAPTURE(t);
    CHECK(worst <= 1e-4);
  }
}

TEST_CASE("permutation equivariance") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 20; ++t) {
    auto inst = random_instance(rng);
    const Matrix p = oracle::permutation(static_cast<std::size_t>(inst.x.rows()), rng);
    const ActivationPlan plan{Activation::Tanh, t % 2 == 0};
    const Matrix lhs = gnn_output(inst.params, p * inst.gso * p.transpose(), p * inst.x, plan);
    const Matrix rhs = p * gnn_output(inst.params, inst.gso, inst.x, plan);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("loss examples") {
  Matrix y(1, 2), yhat(1, 2);
  y << 1, 0;
  yhat << 0, 0;
  const auto r = loss_and_grad(LossKind::HalfMeanSquare, y, yhat);
  CHECK(r.value == 0.25);
  CHECK(r.d_yhat(0, 0) == -0.5);
  CHECK(r.d_yhat(0, 1) == 0.0);
  const auto same = loss_and_grad(LossKind::HalfMeanSquare, y, y);
  CHECK(same.value == 0.0);
  CHECK(same.d_yhat.isZero(0.0));
  CHECK(loss_and_grad(LossKind::HalfMeanSquare, 0.0 * y, 0.0 * yhat).value == 0.0);
  CHECK(loss_and_grad(LossKind::HalfSquare, y, yhat).value == 0.5);
  CHECK_THROWS_AS(loss_and_grad(LossKind::HalfMeanSquare, y, Matrix::Zero(2, 1)), std::invalid_argument);
}

TEST_CASE("loss gradient is 1-Lipschitz") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int t = 0; t < 50; ++t) {
    Matrix y = Matrix::NullaryExpr(3, 2, [&] { return g(rng); });
    Matrix a = Matrix::NullaryExpr(3, 2, [&] { return g(rng); });
    Matrix b = Matrix::NullaryExpr(3, 2, [&] { return g(rng); });
    const auto ga = loss_and_grad(LossKind::HalfMeanSquare, y, a).d_yhat;
    const auto gb = loss_and_grad(LossKind::HalfMeanSquare, y, b).d_yhat;
    CHECK((ga - gb).norm() <= (a - b).norm() + 1e-15);
  }
}

TEST_CASE("spectral response") {
  const std::vector<double> one = {1, 0, 0};
  CHECK(spectral_response(one, -0.7) == 1.0);
  const std::vector<double> lin = {0, 1};
  CHECK(spectral_response(lin, 0.3) == 0.3);
  const std::vector<double> quad = {1, 2, 3};
  CHECK(spectral_response(quad, 0.5) == 1.0 + 2.0 * 0.5 + 3.0 * 0.25);
  CHECK(spectral_response(quad, 0.5) == 2.75);
}

TEST_CASE("non-amplifying projection") {
  auto feasible = project_nonamplifying(scalar_taps({0.2, 0.3}), 1e-3);
  CHECK(feasible.tap(0, 0)(0, 0) == 0.2);
  CHECK(feasible.tap(0, 1)(0, 0) == 0.3);

  auto scaled = project_nonamplifying(scalar_taps({2.0, 0.0}), 1e-3);
  CHECK(scaled.tap(0, 0)(0, 0) == doctest::Approx(0.999).epsilon(1e-15));
  CHECK(scaled.tap(0, 1)(0, 0) == 0.0);

  CHECK(project_nonamplifying(scalar_taps({0.0, 0.0, 0.0}), 1e-3) == scalar_taps({0.0, 0.0, 0.0}));

  std::mt19937_64 rng(12);
  for (int t = 0; t < 30; ++t) {
    auto inst = random_instance(rng);
    const auto p = project_nonamplifying(inst.params, 1e-2);
    for (std::size_t l = 0; l < p.layers(); ++l) {
      for (Eigen::Index i = 0; i < p.tap(l, 0).rows(); ++i) {
        for (Eigen::Index j = 0; j < p.tap(l, 0).cols(); ++j) {
          std::vector<double> h;
          for (std::size_t k = 0; k < p.taps(); ++k) h.push_back(p.tap(l, k)(i, j));
          for (double lam = -1.0; lam <= 1.0; lam += 0.05) CHECK(std::abs(spectral_response(h, lam)) <= 0.99 + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("gradient norm bound formula") {
  CHECK(grad_norm_bound(1, 1, 1) == 1.0);
  CHECK(grad_norm_bound(2, 2, 4) == 32.0);
  CHECK(grad_norm_bound(3, 1, 9) == 3.0);
}

TEST_CASE("jacobian norm matches explicit finite-difference Jacobian") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 5; ++t) {
    auto inst = random_instance(rng, 5);
    const ActivationPlan plan{};
    double fd_sq = 0.0;
    auto theta = inst.params.flatten();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double keep = theta[i];
      ParamTensor q = inst.params;
      theta[i] = keep + 1e-6;
      q.assign(theta);
      const Matrix up = gnn_output(q, inst.gso, inst.x, plan);
      theta[i] = keep - 1e-6;
      q.assign(theta);
      const Matrix down = gnn_output(q, inst.gso, inst.x, plan);
      theta[i] = keep;
      fd_sq += ((up - down) / 2e-6).squaredNorm();
    }
    CHECK(jacobian_norm(inst.params, inst.gso, inst.x, plan) == doctest::Approx(std::sqrt(fd_sq)).epsilon(1e-6));
  }
}

TEST_CASE("initialisation is seeded and non-amplifying") {
  const auto a = init_params(3, {6, 16, 2}, 42);
  const auto b = init_params(3, {6, 16, 2}, 42);
  CHECK(a == b);
  CHECK_FALSE(a == init_params(3, {6, 16, 2}, 43));
  CHECK(a.parameter_count() == 3 * 6 * 16 + 3 * 16 * 2);
  for (std::size_t l = 0; l < a.layers(); ++l) {
    const double bound = 1.0 / (3.0 * static_cast<double>(std::max(a.dims()[l], a.dims()[l + 1])));
    for (std::size_t k = 0; k < 3; ++k) CHECK(a.tap(l, k).cwiseAbs().maxCoeff() <= bound);
  }
}

TEST_CASE("parameter container round trip and CSV export") {
  const auto p = init_params(2, {3, 4, 1}, 7);
  const ActivationPlan plan{Activation::Tanh, true};
  const auto path = std::filesystem::temp_directory_path() / "growgraph_params_test.bin";
  save_params(path, p, plan, 7);
  const auto back = load_params(path);
  CHECK(back.params == p);
  CHECK(back.plan.identity_readout);
  CHECK(back.plan.hidden == Activation::Tanh);
  CHECK(back.seed == 7);
  std::filesystem::remove(path);

  std::ostringstream csv;
  export_params_csv(csv, p);
  const std::string text = csv.str();
  CHECK(text.rfind("layer,tap,row,col,value\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == p.parameter_count() + 1);
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

}  // TEST_SUITE
