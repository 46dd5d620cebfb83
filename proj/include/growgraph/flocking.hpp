#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <json.hpp>

#include "growgraph/dataset.hpp"
#include "growgraph/linalg.hpp"
#include "growgraph/params.hpp"
#include "growgraph/task.hpp"

namespace growgraph::flock {

using Vec2 = Eigen::Vector2d;

struct FlockConfig {
  double comm_radius = 2.0;   ///< m
  double ca_radius = 1.0;     ///< m
  double dt = 0.02;           ///< s
  double u_bound = 10.0;      ///< m/s^2, per axis
  double min_init_dist = 0.1; ///< m
  std::optional<double> init_disc_radius;  ///< m; sqrt(n / pi) when unset
  double vel_bias_range = 3.0;   ///< m/s
  double vel_noise_range = 3.0;  ///< m/s
  std::size_t horizon = 100;     ///< steps
  /// Use +grad CA in the expert (attractive) instead of the repulsive -grad CA.
  bool literal_expert_sign = false;

  double disc_radius(std::size_t n) const;
  /// Throws ConfigError unless all quantities are positive and ca_radius <= comm_radius.
  void validate() const;
  static FlockConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct FlockState {
  Matrix positions;   ///< n x 2
  Matrix velocities;  ///< n x 2
  std::size_t t = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(positions.rows()); }
};

struct TrajectoryStep {
  FlockState state;  ///< before the action is applied
  Matrix adjacency;
  Matrix features;   ///< n x 6
  Matrix actions;    ///< n x 2, clamped
  double sigma_v = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  FlockState final_state;
};

/// Rejection-sampled positions in a disc with pairwise distance >= min_init_dist, and
/// velocities v_BIAS + noise, both uniform per axis. Throws ConfigError after 10^6 rejections.
FlockState init_swarm(std::size_t n, const FlockConfig& config, std::uint64_t seed);

struct CommGraph {
  Matrix adjacency;  ///< 0/1, symmetric, zero diagonal
  Matrix gso;        ///< adjacency / n
};
/// Edge iff ||r_i - r_j|| <= radius, i != j.
CommGraph comm_graph(const Matrix& positions, double radius);

struct CaTerm {
  double value = 0.0;
  Vec2 grad_ri = Vec2::Zero();
};
/// 1/d^2 - log d^2 for d <= R_CA, 1/R_CA^2 - log R_CA^2 otherwise; gradient with respect to r_i.
/// Throws SingularityError when d = 0.
CaTerm ca_potential_and_gradient(const Vec2& ri, const Vec2& rj, double ca_radius);

/// Per-axis clamp to [-bound, bound].
Matrix clamp_actions(Matrix actions, double bound);

/// u_i = -n (v_i - mean v) + sum_{j != i} (-grad_{r_i} CA(r_i, r_j)), then clamped.
Matrix expert_controller(const FlockState& state, const FlockConfig& config);

/// r+ = u T^2/2 + v T + r, v+ = u T + v.
FlockState step_dynamics(const FlockState& state, const Matrix& actions, double dt);

/// Row i: sum over neighbours j of [v_i - v_j, r_ij/|r_ij|^4, r_ij/|r_ij|^2], r_ij = r_i - r_j.
Matrix agent_features(const FlockState& state, const Matrix& adjacency);

/// sum_i ||v_i - mean v||^2.
double velocity_variation(const Matrix& velocities);
inline double velocity_variation(const FlockState& s) { return velocity_variation(s.velocities); }

double min_pairwise_distance(const Matrix& positions);

struct ExpertPolicy {};
struct GnnPolicy {
  ParamTensor params;  ///< F_0 = 6, F_L = 2
  ActivationPlan plan;
};
using Policy = std::variant<ExpertPolicy, GnnPolicy>;

/// Closed-loop simulation. Throws SingularityError naming the step on a collision at d = 0.
Trajectory rollout(const FlockState& initial, const Policy& policy, const FlockConfig& config,
                   std::size_t horizon);

/// Expert rollouts; one sample per (episode, step) in that order. A rollout that hits a
/// singularity is retried with a new derived seed, at most 10 times.
Dataset generate_dataset(std::size_t n, std::size_t episodes, std::size_t horizon,
                         const FlockConfig& config, std::uint64_t seed, std::size_t threads = 1);

/// Initial state of episode e as used by generate_dataset (before any retry).
std::uint64_t episode_seed(std::uint64_t seed, std::size_t episode, std::size_t attempt = 0);

struct RelativeCost {
  double value = 0.0;
  bool degenerate = false;  ///< expert cost was zero; value is +inf
};
/// sum_t sigma_v(policy) / sum_t sigma_v(expert).
RelativeCost relative_cost(const Trajectory& policy, const Trajectory& expert);
RelativeCost relative_cost(std::span<const Trajectory> policy, std::span<const Trajectory> expert);

/// `episode,step,agent,rx,ry,vx,vy,ux,uy,sigma_v`.
void write_trajectory_csv_header(std::ostream& out);
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, std::size_t episode);

/// Expert imitation data at any swarm size.
class FlockTask final : public Task {
 public:
  FlockTask(FlockConfig config, std::size_t episodes, std::size_t horizon, std::uint64_t seed,
            std::size_t threads = 1);

  std::size_t input_features() const override { return 6; }
  std::size_t output_features() const override { return 2; }
  Dataset epoch_dataset(std::size_t n, std::size_t epoch) const override;

 private:
  FlockConfig config_;
  std::size_t episodes_;
  std::size_t horizon_;
  std::uint64_t seed_;
  std::size_t threads_;
};

}  // namespace growgraph::flock
