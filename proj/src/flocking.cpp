#include "growgraph/flocking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>

#include "growgraph/errors.hpp"
#include "growgraph/gnn.hpp"
#include "growgraph/parallel.hpp"
#include "growgraph/params_io.hpp"
#include "growgraph/random.hpp"
#include "growgraph/strict_json.hpp"

namespace growgraph::flock {

double FlockConfig::disc_radius(std::size_t n) const {
  return init_disc_radius ? *init_disc_radius
                          : std::sqrt(static_cast<double>(n) / std::numbers::pi);
}

void FlockConfig::validate() const {
  const bool positive = comm_radius > 0 && ca_radius > 0 && dt > 0 && u_bound > 0 &&
                        min_init_dist > 0 && vel_bias_range >= 0 && vel_noise_range >= 0 &&
                        (!init_disc_radius || *init_disc_radius > 0);
  if (!positive) throw ConfigError("flock: radii, dt, u_bound and ranges must be positive");
  if (ca_radius > comm_radius) throw ConfigError("flock: ca_radius must not exceed comm_radius");
}

FlockConfig FlockConfig::from_json(const nlohmann::json& j) {
  const std::string where = "flock";
  strict::require_keys(j,
                       {"comm_radius", "ca_radius", "dt", "u_bound", "min_init_dist",
                        "init_disc_radius", "vel_bias_range", "vel_noise_range", "horizon",
                        "literal_expert_sign"},
                       where);
  FlockConfig c;
  c.comm_radius = strict::number_or(j, "comm_radius", c.comm_radius, where);
  c.ca_radius = strict::number_or(j, "ca_radius", c.ca_radius, where);
  c.dt = strict::number_or(j, "dt", c.dt, where);
  c.u_bound = strict::number_or(j, "u_bound", c.u_bound, where);
  c.min_init_dist = strict::number_or(j, "min_init_dist", c.min_init_dist, where);
  if (j.contains("init_disc_radius") && !j.at("init_disc_radius").is_null()) {
    c.init_disc_radius = strict::number(j, "init_disc_radius", where);
  }
  c.vel_bias_range = strict::number_or(j, "vel_bias_range", c.vel_bias_range, where);
  c.vel_noise_range = strict::number_or(j, "vel_noise_range", c.vel_noise_range, where);
  c.horizon = strict::unsigned_or(j, "horizon", c.horizon, where);
  c.literal_expert_sign = strict::boolean_or(j, "literal_expert_sign", false, where);
  c.validate();
  return c;
}

nlohmann::json FlockConfig::to_json() const {
  nlohmann::json j = {{"comm_radius", comm_radius},
                      {"ca_radius", ca_radius},
                      {"dt", dt},
                      {"u_bound", u_bound},
                      {"min_init_dist", min_init_dist},
                      {"init_disc_radius", nullptr},
                      {"vel_bias_range", vel_bias_range},
                      {"vel_noise_range", vel_noise_range},
                      {"horizon", horizon},
                      {"literal_expert_sign", literal_expert_sign}};
  if (init_disc_radius) j["init_disc_radius"] = *init_disc_radius;
  return j;
}

FlockState init_swarm(std::size_t n, const FlockConfig& config, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("init_swarm: n must be >= 1");
  config.validate();
  Rng rng = make_rng(seed);
  const double radius = config.disc_radius(n);
  const double min_sq = config.min_init_dist * config.min_init_dist;
  FlockState s;
  s.positions = Matrix::Zero(static_cast<Eigen::Index>(n), 2);
  s.velocities = Matrix::Zero(static_cast<Eigen::Index>(n), 2);
  constexpr std::size_t kMaxAttempts = 1'000'000;
  std::size_t attempts = 0;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (;;) {
      if (++attempts > kMaxAttempts) {
        throw ConfigError("init_swarm: disc too dense for the minimum distance");
      }
      const double r = radius * std::sqrt(uniform01(rng));
      const double theta = 2.0 * std::numbers::pi * uniform01(rng);
      const Vec2 p(r * std::cos(theta), r * std::sin(theta));
      bool ok = true;
      for (Eigen::Index j = 0; j < i && ok; ++j) {
        ok = (s.positions.row(j).transpose() - p).squaredNorm() >= min_sq;
      }
      if (ok) {
        s.positions.row(i) = p.transpose();
        break;
      }
    }
  }
  const double b = config.vel_bias_range;
  const Vec2 bias(uniform(rng, -b, b), uniform(rng, -b, b));
  const double w = config.vel_noise_range;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    s.velocities(i, 0) = bias.x() + uniform(rng, -w, w);
    s.velocities(i, 1) = bias.y() + uniform(rng, -w, w);
  }
  return s;
}

CommGraph comm_graph(const Matrix& positions, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("comm_graph: radius must be > 0");
  const Eigen::Index n = positions.rows();
  CommGraph g;
  g.adjacency = Matrix::Zero(n, n);
  const double r_sq = radius * radius;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if ((positions.row(i) - positions.row(j)).squaredNorm() <= r_sq) {
        g.adjacency(i, j) = 1.0;
        g.adjacency(j, i) = 1.0;
      }
    }
  }
  g.gso = n > 0 ? Matrix(g.adjacency / static_cast<double>(n)) : g.adjacency;
  return g;
}

CaTerm ca_potential_and_gradient(const Vec2& ri, const Vec2& rj, double ca_radius) {
  const Vec2 diff = ri - rj;
  const double d_sq = diff.squaredNorm();
  if (d_sq == 0.0) throw SingularityError("collision-avoidance potential at zero distance");
  CaTerm t;
  if (d_sq <= ca_radius * ca_radius) {
    t.value = 1.0 / d_sq - std::log(d_sq);
    t.grad_ri = -2.0 * diff * (1.0 / (d_sq * d_sq) + 1.0 / d_sq);
  } else {
    const double r_sq = ca_radius * ca_radius;
    t.value = 1.0 / r_sq - std::log(r_sq);
  }
  return t;
}

Matrix clamp_actions(Matrix actions, double bound) {
  return actions.cwiseMax(-bound).cwiseMin(bound);
}

Matrix expert_controller(const FlockState& state, const FlockConfig& config) {
  const Eigen::Index n = state.positions.rows();
  const Eigen::RowVector2d mean = state.velocities.colwise().mean();
  Matrix u = -static_cast<double>(n) * (state.velocities.rowwise() - mean);
  const double sign = config.literal_expert_sign ? 1.0 : -1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2 ri = state.positions.row(i).transpose();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto term = ca_potential_and_gradient(ri, state.positions.row(j).transpose(),
                                                  config.ca_radius);
      u.row(i) += sign * term.grad_ri.transpose();
    }
  }
  return clamp_actions(std::move(u), config.u_bound);
}

FlockState step_dynamics(const FlockState& state, const Matrix& actions, double dt) {
  if (actions.rows() != state.positions.rows() || actions.cols() != 2) {
    throw std::invalid_argument("step_dynamics: action shape mismatch");
  }
  if (!actions.allFinite()) throw std::invalid_argument("step_dynamics: non-finite action");
  FlockState next;
  next.positions = actions * (0.5 * dt * dt) + state.velocities * dt + state.positions;
  next.velocities = actions * dt + state.velocities;
  next.t = state.t + 1;
  return next;
}

Matrix agent_features(const FlockState& state, const Matrix& adjacency) {
  const Eigen::Index n = state.positions.rows();
  if (adjacency.rows() != n || adjacency.cols() != n) {
    throw std::invalid_argument("agent_features: adjacency does not match state");
  }
  Matrix x = Matrix::Zero(n, 6);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i || adjacency(i, j) == 0.0) continue;
      const Vec2 r = (state.positions.row(i) - state.positions.row(j)).transpose();
      const double d_sq = r.squaredNorm();
      if (d_sq == 0.0) throw SingularityError("agent_features: coincident neighbours");
      x(i, 0) += state.velocities(i, 0) - state.velocities(j, 0);
      x(i, 1) += state.velocities(i, 1) - state.velocities(j, 1);
      x(i, 2) += r.x() / (d_sq * d_sq);
      x(i, 3) += r.y() / (d_sq * d_sq);
      x(i, 4) += r.x() / d_sq;
      x(i, 5) += r.y() / d_sq;
    }
  }
  return x;
}

double velocity_variation(const Matrix& velocities) {
  if (velocities.rows() == 0) return 0.0;
  const Eigen::RowVector2d mean = velocities.colwise().mean();
  return (velocities.rowwise() - mean).squaredNorm();
}

double min_pairwise_distance(const Matrix& positions) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < positions.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < positions.rows(); ++j) {
      best = std::min(best, (positions.row(i) - positions.row(j)).norm());
    }
  }
  return best;
}

Trajectory rollout(const FlockState& initial, const Policy& policy, const FlockConfig& config,
                   std::size_t horizon) {
  if (const auto* g = std::get_if<GnnPolicy>(&policy)) {
    if (g->params.dims().front() != 6 || g->params.dims().back() != 2) {
      throw std::invalid_argument("rollout: GNN policy must map 6 features to 2 actions");
    }
  }
  Trajectory traj;
  traj.steps.reserve(horizon);
  FlockState state = initial;
  for (std::size_t step = 0; step < horizon; ++step) {
    try {
      TrajectoryStep rec;
      auto graph = comm_graph(state.positions, config.comm_radius);
      rec.features = agent_features(state, graph.adjacency);
      if (std::holds_alternative<ExpertPolicy>(policy)) {
        rec.actions = expert_controller(state, config);
      } else {
        const auto& g = std::get<GnnPolicy>(policy);
        rec.actions = clamp_actions(gnn_output(g.params, graph.gso, rec.features, g.plan),
                                    config.u_bound);
      }
      rec.adjacency = std::move(graph.adjacency);
      rec.sigma_v = velocity_variation(state);
      FlockState next = step_dynamics(state, rec.actions, config.dt);
      rec.state = std::move(state);
      traj.steps.push_back(std::move(rec));
      state = std::move(next);
    } catch (const SingularityError& e) {
      throw SingularityError("rollout aborted at step " + std::to_string(step) + ": " + e.what());
    }
  }
  traj.final_state = std::move(state);
  return traj;
}

std::uint64_t episode_seed(std::uint64_t seed, std::size_t episode, std::size_t attempt) {
  return derive_seed(derive_seed(seed, episode), attempt);
}

Dataset generate_dataset(std::size_t n, std::size_t episodes, std::size_t horizon,
                         const FlockConfig& config, std::uint64_t seed, std::size_t threads) {
  if (episodes < 1) throw std::invalid_argument("generate_dataset: episodes must be >= 1");
  std::vector<Trajectory> trajectories(episodes);
  parallel_for(episodes, threads, [&](std::size_t e) {
    constexpr std::size_t kRetries = 10;
    for (std::size_t attempt = 0;; ++attempt) {
      try {
        trajectories[e] = rollout(init_swarm(n, config, episode_seed(seed, e, attempt)),
                                  ExpertPolicy{}, config, horizon);
        return;
      } catch (const SingularityError&) {
        if (attempt >= kRetries) throw;
      }
    }
  });
  Dataset d;
  d.input_features = 6;
  d.output_features = 2;
  d.samples.reserve(episodes * horizon);
  for (auto& traj : trajectories) {
    for (auto& step : traj.steps) {
      Sample s;
      s.gso = std::make_shared<const Matrix>(step.adjacency / static_cast<double>(n));
      s.x = std::move(step.features);
      s.y = std::move(step.actions);
      d.samples.push_back(std::move(s));
    }
  }
  return d;
}

RelativeCost relative_cost(std::span<const Trajectory> policy, std::span<const Trajectory> expert) {
  if (policy.size() != expert.size()) {
    throw std::invalid_argument("relative_cost: episode counts differ");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t e = 0; e < policy.size(); ++e) {
    if (policy[e].steps.size() != expert[e].steps.size()) {
      throw std::invalid_argument("relative_cost: horizons differ");
    }
    for (const auto& s : policy[e].steps) num += s.sigma_v;
    for (const auto& s : expert[e].steps) den += s.sigma_v;
  }
  if (den == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {num / den, false};
}

RelativeCost relative_cost(const Trajectory& policy, const Trajectory& expert) {
  return relative_cost(std::span<const Trajectory>(&policy, 1), std::span<const Trajectory>(&expert, 1));
}

void write_trajectory_csv_header(std::ostream& out) {
  out << "episode,step,agent,rx,ry,vx,vy,ux,uy,sigma_v\n";
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, std::size_t episode) {
  for (std::size_t t = 0; t < trajectory.steps.size(); ++t) {
    const auto& s = trajectory.steps[t];
    const std::string sigma = format_double(s.sigma_v);
    for (Eigen::Index i = 0; i < s.state.positions.rows(); ++i) {
      out << episode << ',' << t << ',' << i << ',' << format_double(s.state.positions(i, 0)) << ','
          << format_double(s.state.positions(i, 1)) << ',' << format_double(s.state.velocities(i, 0))
          << ',' << format_double(s.state.velocities(i, 1)) << ','
          << format_double(s.actions(i, 0)) << ',' << format_double(s.actions(i, 1)) << ',' << sigma
          << '\n';
    }
  }
}

FlockTask::FlockTask(FlockConfig config, std::size_t episodes, std::size_t horizon,
                     std::uint64_t seed, std::size_t threads)
    : config_(std::move(config)), episodes_(episodes), horizon_(horizon), seed_(seed), threads_(threads) {
  config_.validate();
}

Dataset FlockTask::epoch_dataset(std::size_t n, std::size_t epoch) const {
  return generate_dataset(n, episodes_, horizon_, config_, derive_seed(seed_, epoch), threads_);
}

}  // namespace growgraph::flock
