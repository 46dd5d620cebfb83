// Acceptance suite: one PASS/FAIL line per criterion. Exits 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "growgraph/distance.hpp"
#include "growgraph/flocking.hpp"
#include "growgraph/gnn.hpp"
#include "growgraph/graph.hpp"
#include "growgraph/loss.hpp"
#include "growgraph/random.hpp"
#include "growgraph/teacher_student.hpp"
#include "growgraph/trainer.hpp"
#include "oracles.hpp"

using namespace growgraph;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kMasterSeed = 1;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < limit_s;
  const bool pass = o.pass && in_time;
  failures += !pass;
  std::ostringstream line;
  line << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " | " << o.detail
       << " | time " << std::fixed << std::setprecision(2) << secs << " s (limit " << limit_s << " s)";
  if (!in_time) line << " TOO SLOW";
  std::cout << line.str() << std::endl;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

std::mt19937_64 criterion_rng(int id) { return std::mt19937_64(derive_seed(kMasterSeed, id)); }

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Matrix::NullaryExpr(r, c, [&] { return u(rng); });
}

ParamTensor random_params(std::size_t taps, const std::vector<std::size_t>& dims, std::mt19937_64& rng,
                          double lo = -1.0, double hi = 1.0) {
  ParamTensor p(taps, dims);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l)
    for (std::size_t k = 0; k < taps; ++k) p.tap(l, k) = random_matrix(p.tap(l, k).rows(), p.tap(l, k).cols(), rng, lo, hi);
  return p;
}

// ---- 1 -------------------------------------------------------------------------------------

Outcome sampling_bounds() {
  const auto w = Graphon::additive();
  const auto x = GraphonSignal::identity();
  double worst_sig = 0.0, worst_gra = 0.0;
  bool ok = true;
  for (std::size_t n : {4u, 8u, 16u, 32u, 64u, 128u}) {
    const double sd = l2_signal_distance(x, induced_step_signal(x.sample(n)), 4096);
    const double gd = l2_graphon_distance(w, template_step(w, n), 8 * n);
    ok = ok && sd <= 1.0 / n && gd <= 2.0 / n + 1e-3;
    worst_sig = std::max(worst_sig, sd * n);
    worst_gra = std::max(worst_gra, gd / (2.0 / n + 1e-3));
  }
  return {ok, "max n*signal_dist " + fmt(worst_sig) + " (<= 1), max graphon_dist/(2/n+1e-3) " + fmt(worst_gra) + " (<= 1)"};
}

// ---- 2 -------------------------------------------------------------------------------------

Outcome gradient_exactness() {
  auto rng = criterion_rng(2);
  std::uniform_int_distribution<std::size_t> nn(2, 8), ll(1, 3), ff(1, 4), kk(1, 4);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = nn(rng), layers = ll(rng), taps = kk(rng);
    std::vector<std::size_t> dims(layers + 1);
    for (auto& d : dims) d = ff(rng);
    const auto params = random_params(taps, dims, rng);
    const Matrix s = oracle::random_adjacency(n, 0.5, rng) / static_cast<double>(n);
    const Matrix x = random_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims[0]), rng);
    const Matrix y = random_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims.back()), rng);
    const ActivationPlan plan{Activation::Tanh, false};
    auto objective = [&](const std::vector<double>& theta) {
      ParamTensor q = params;
      q.assign(theta);
      return loss_and_grad(LossKind::HalfMeanSquare, y, gnn_output(q, s, x, plan)).value;
    };
    const auto fd = oracle::central_gradient(objective, params.flatten(), 1e-6);
    const auto fwd = gnn_forward(params, s, x, plan);
    const auto bp = gnn_backward(fwd.cache, s, loss_and_grad(LossKind::HalfMeanSquare, y, fwd.y).d_yhat, params, plan)
                        .flatten();
    for (std::size_t i = 0; i < fd.size(); ++i) {
      worst = std::max(worst, std::abs(bp[i] - fd[i]) / std::max(1.0, std::abs(fd[i])));
    }
  }
  return {worst <= 1e-4, "max relative error " + fmt(worst) + " (<= 1e-4)"};
}

// ---- 3 -------------------------------------------------------------------------------------

Outcome gradient_norm_bound_check() {
  auto rng = criterion_rng(3);
  std::uniform_int_distribution<std::size_t> nn(4, 32), ll(1, 3), ff(1, 4), kk(1, 4);
  int violations = 0;
  double worst = 0.0;
  std::string worst_arch;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = nn(rng), layers = ll(rng), taps = kk(rng), width = ff(rng);
    std::vector<std::size_t> dims(layers + 1, width);
    dims.front() = dims.back() = 1;
    const auto params = project_nonamplifying(random_params(taps, dims, rng), 1e-3);
    const Matrix s = sample_graph(Graphon::additive(), n, rng()).gso();
    Matrix x = random_matrix(static_cast<Eigen::Index>(n), 1, rng);
    x /= x.norm();
    const double g = jacobian_norm(params, s, x, ActivationPlan{});
    const double bound = grad_norm_bound(layers, params.max_width(), taps);
    violations += g > bound;
    if (g / bound > worst) {
      worst = g / bound;
      worst_arch = "L=" + std::to_string(layers) + " F=" + std::to_string(params.max_width()) +
                   " K=" + std::to_string(taps);
    }
  }
  return {violations == 0, std::to_string(violations) + " violations of ||grad|| <= F^(2L) sqrt(K) in 100 nets, max ratio " +
                               fmt(worst) + " at " + worst_arch};
}

/// Informational: scalar two-layer net with both taps at the non-amplifying limit.
void gradient_norm_boundary_note() {
  ParamTensor p(1, {1, 1, 1});
  p.tap(0, 0)(0, 0) = 0.999;
  p.tap(1, 0)(0, 0) = 0.999;
  const std::size_t n = 64;
  const Matrix s = sample_graph(Graphon::additive(), n, 5).gso();
  const Matrix x = Matrix::Constant(n, 1, 1.0 / std::sqrt(static_cast<double>(n)));
  const double g = jacobian_norm(p, s, x, ActivationPlan{});
  std::cout << "note criterion 3: boundary instance L=2 F=1 K=1, taps 0.999, x = 1/sqrt(n): ||grad|| = " << fmt(g)
            << " vs bound " << fmt(grad_norm_bound(2, 1, 1)) << std::endl;
}

// ---- 4 -------------------------------------------------------------------------------------

Outcome gradient_distance_trend() {
  const std::uint64_t seed = derive_seed(kMasterSeed, 4);
  auto teacher = init_params(3, {1, 4, 1}, derive_seed(seed, 1));
  teacher *= 4.0;
  teacher = project_nonamplifying(std::move(teacher), 1e-3);
  const auto student = init_params(3, {1, 4, 1}, derive_seed(seed, 2));
  TeacherStudentTask task(Graphon::additive(), teacher, ActivationPlan{}, 1, SignalSpec{}, derive_seed(seed, 3));
  std::vector<double> medians;
  for (std::size_t n : {32u, 64u, 128u}) {
    medians.push_back(grad_distance_estimate(student, ActivationPlan{}, LossKind::HalfMeanSquare, task, n, 512, 50,
                                             derive_seed(seed, 4))
                          .median);
  }
  const bool ok = medians[0] > medians[1] && medians[1] > medians[2];
  return {ok, "medians n=32,64,128 vs ref 512: " + fmt(medians[0]) + ", " + fmt(medians[1]) + ", " + fmt(medians[2]) +
                  " (strictly decreasing)"};
}

// ---- 5 -------------------------------------------------------------------------------------

Outcome expert_sanity() {
  const flock::FlockConfig cfg;
  const std::uint64_t seed = derive_seed(kMasterSeed, 5);
  int passes = 0;
  double worst_ratio = 0.0, closest = 1e300;
  for (std::size_t e = 0; e < 20; ++e) {
    const auto t = flock::rollout(flock::init_swarm(25, cfg, flock::episode_seed(seed, e)), flock::ExpertPolicy{}, cfg, 200);
    double d = flock::min_pairwise_distance(t.final_state.positions);
    for (const auto& s : t.steps) d = std::min(d, flock::min_pairwise_distance(s.state.positions));
    const double ratio = flock::velocity_variation(t.final_state) / t.steps.front().sigma_v;
    passes += ratio <= 0.05 && d >= 0.05;
    worst_ratio = std::max(worst_ratio, ratio);
    closest = std::min(closest, d);
  }
  return {passes >= 19, std::to_string(passes) + "/20 seeds pass (>= 19); max final/initial sigma_v " + fmt(worst_ratio) +
                            ", closest approach " + fmt(closest) + " m"};
}

// ---- 6 -------------------------------------------------------------------------------------

Outcome growing_vs_fixed() {
  const std::uint64_t seed = derive_seed(kMasterSeed, 6);
  const flock::FlockConfig cfg;
  const ActivationPlan plan{Activation::Tanh, true};
  const std::size_t episodes = 20, horizon = 100;
  flock::FlockTask task(cfg, episodes, horizon, derive_seed(seed, 1));
  const auto initial = init_params(3, {6, 16, 2}, derive_seed(seed, 2));
  auto train = [&](std::size_t n0, std::size_t delta) {
    TrainConfig c;
    c.eta = 1e-3;
    c.lipschitz_estimate = 500.0;
    c.epochs = 8;
    c.n0 = n0;
    c.n_max = 50;
    c.growth = FixedIncrement{delta};
    c.c = 1e-12;
    c.epsilon = 1e-12;
    c.seed = derive_seed(seed, 3);
    return train_growing(c, task, initial, plan);
  };
  const auto grow = train(10, 5);
  const auto fixed = train(50, 0);
  const std::size_t last_n = grow.log.rows.back().n;

  double cost_grow = 0.0, cost_fixed = 0.0;
  for (std::size_t e = 0; e < 10; ++e) {
    const auto init = flock::init_swarm(50, cfg, flock::episode_seed(derive_seed(seed, 4), e));
    const auto expert = flock::rollout(init, flock::ExpertPolicy{}, cfg, horizon);
    cost_grow += flock::relative_cost(flock::rollout(init, flock::GnnPolicy{grow.params, plan}, cfg, horizon), expert).value;
    cost_fixed += flock::relative_cost(flock::rollout(init, flock::GnnPolicy{fixed.params, plan}, cfg, horizon), expert).value;
  }
  cost_grow /= 10.0;
  cost_fixed /= 10.0;
  const bool ok = cost_grow <= 1.25 * cost_fixed && grow.log.rows.size() == 8 && fixed.log.rows.size() == 8;
  return {ok, "growing (n 10.." + std::to_string(last_n) + ") relative cost " + fmt(cost_grow) + ", fixed n=50 " +
                  fmt(cost_fixed) + ", ratio " + fmt(cost_grow / cost_fixed) + " (<= 1.25)"};
}

// ---- 7 -------------------------------------------------------------------------------------

Outcome ca_gradient() {
  auto potential = [](const flock::Vec2& a, const flock::Vec2& b) {
    return flock::ca_potential_and_gradient(a, b, 1.0).value;
  };
  double worst = 0.0;
  const flock::Vec2 rj(0.2, -0.4);
  for (double d : {0.2, 0.5, 0.9}) {
    const flock::Vec2 ri = rj + d * flock::Vec2(std::cos(1.1), std::sin(1.1));
    const auto g = flock::ca_potential_and_gradient(ri, rj, 1.0).grad_ri;
    for (int axis = 0; axis < 2; ++axis) {
      flock::Vec2 up = ri, down = ri;
      up[axis] += 1e-6;
      down[axis] -= 1e-6;
      worst = std::max(worst, std::abs(g[axis] - (potential(up, rj) - potential(down, rj)) / 2e-6));
    }
  }
  const double inside = potential(flock::Vec2(1.0, 0.0), flock::Vec2(0.0, 0.0));
  const double outside = potential(flock::Vec2(1.0 + 1e-9, 0.0), flock::Vec2(0.0, 0.0));
  const double jump = std::abs(inside - outside);
  return {worst <= 1e-6 && jump <= 1e-12,
          "max |grad - fd| " + fmt(worst) + " (<= 1e-6), jump at R_CA " + fmt(jump) + " (<= 1e-12)"};
}

// ---- 8 -------------------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Runs the CLI and returns the run directory it prints. Exit 1 (threshold failure) still leaves outputs.
fs::path cli(const std::string& command, const fs::path& config, const fs::path& out, int threads, int& status) {
  const fs::path capture = out / ("stdout_" + std::to_string(threads) + ".txt");
  fs::create_directories(out);
  const std::string cmd = std::string("\"") + GROWGRAPH_CLI_PATH + "\" " + command + " --config \"" + config.string() +
                          "\" --out \"" + out.string() + "\" --threads " + std::to_string(threads) + " > \"" +
                          capture.string() + "\"";
  const int raw = std::system(cmd.c_str());
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  if (status != 0 && status != 1) throw std::runtime_error(command + " exited with status " + std::to_string(status));
  std::string dir = slurp(capture);
  while (!dir.empty() && (dir.back() == '\n' || dir.back() == '\r')) dir.pop_back();
  return dir;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "growgraph_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const json check = {{"seed", 11},
                      {"graphon", {{"family", "additive"}, {"params", json::object()}}},
                      {"signal", "identity"},
                      {"sizes", {4, 8, 16, 32, 64, 128}},
                      {"grid_factor", 8}};
  const json expert = {{"seed", 12},        {"n", 25},           {"episodes", 20},
                       {"horizon", 200},    {"trajectories", true}, {"policy", {{"kind", "expert"}}},
                       {"max_sigma_ratio", 0.05}, {"min_distance", 0.05}};
  std::ofstream(root / "check.json") << check.dump(2);
  std::ofstream(root / "expert.json") << expert.dump(2);

  std::size_t compared = 0;
  bool same = true;
  for (const auto& [command, config, files] :
       std::vector<std::tuple<std::string, std::string, std::vector<std::string>>>{
           {"graphon-check", "check.json", {"graphon_check.csv"}},
           {"flock-eval", "expert.json", {"flock_eval.csv", "trajectories.csv"}}}) {
    std::vector<fs::path> dirs;
    std::vector<int> statuses;
    int r = 0;
    for (int threads : {1, 4}) {
      for (int rep = 0; rep < 2; ++rep) {
        int status = 0;
        dirs.push_back(cli(command, root / config, root / ("run" + std::to_string(r++)), threads, status));
        statuses.push_back(status);
      }
    }
    same = same && std::all_of(statuses.begin(), statuses.end(), [&](int v) { return v == statuses[0]; });
    for (const auto& f : files) {
      const std::string ref = slurp(dirs[0] / f);
      same = same && !ref.empty();
      for (std::size_t i = 1; i < dirs.size(); ++i) {
        same = same && dirs[i].filename() == dirs[0].filename() && slurp(dirs[i] / f) == ref;
        ++compared;
      }
    }
  }
  return {same, std::to_string(compared) + " CSV comparisons across repeats and --threads 1/4, all byte-identical: " +
                    (same ? "yes" : "no")};
}

// ---- 9 -------------------------------------------------------------------------------------

Outcome permutation_equivariance() {
  auto rng = criterion_rng(9);
  double worst_gnn = 0.0, worst_feat = 0.0;
  std::uniform_int_distribution<std::size_t> nn(2, 30), ll(1, 3), ff(1, 6), kk(1, 4);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = nn(rng), layers = ll(rng), taps = kk(rng);
    std::vector<std::size_t> dims(layers + 1);
    for (auto& d : dims) d = ff(rng);
    const auto params = random_params(taps, dims, rng);
    const Matrix s = oracle::random_adjacency(n, 0.4, rng) / static_cast<double>(n);
    const Matrix x = random_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims[0]), rng);
    const Matrix p = oracle::permutation(n, rng);
    const ActivationPlan plan{Activation::Tanh, t % 2 == 0};
    const Matrix lhs = gnn_output(params, p * s * p.transpose(), p * x, plan);
    const Matrix rhs = p * gnn_output(params, s, x, plan);
    worst_gnn = std::max(worst_gnn, (lhs - rhs).cwiseAbs().maxCoeff());

    const auto state = flock::init_swarm(n, flock::FlockConfig{}, rng());
    flock::FlockState permuted{p * state.positions, p * state.velocities, 0};
    const Matrix fa = flock::agent_features(permuted, flock::comm_graph(permuted.positions, 2.0).adjacency);
    const Matrix fb = p * flock::agent_features(state, flock::comm_graph(state.positions, 2.0).adjacency);
    worst_feat = std::max(worst_feat, (fa - fb).cwiseAbs().maxCoeff());
  }
  return {worst_gnn <= 1e-12 && worst_feat <= 1e-12,
          "max deviation gnn_forward " + fmt(worst_gnn) + ", agent_features " + fmt(worst_feat) + " (<= 1e-12)"};
}

}  // namespace

int main() {
  report(1, "sampling/discretization distance sweep", 10, sampling_bounds);
  report(2, "backprop vs central finite differences", 30, gradient_exactness);
  report(3, "gradient-norm bound on projected nets", 60, gradient_norm_bound_check);
  gradient_norm_boundary_note();
  report(4, "gradient distance decreases with n", 600, gradient_distance_trend);
  report(5, "expert flocking sanity", 60, expert_sanity);
  report(6, "growing-graph imitation vs fixed n=50", 1800, growing_vs_fixed);
  report(7, "collision-avoidance gradient and continuity", 1, ca_gradient);
  report(8, "CLI determinism across repeats and threads", 120, determinism);
  report(9, "permutation equivariance", 5, permutation_equivariance);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
