#include "growgraph/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "growgraph/bounds.hpp"
#include "growgraph/errors.hpp"
#include "growgraph/gnn.hpp"
#include "growgraph/parallel.hpp"
#include "growgraph/params_io.hpp"
#include "growgraph/random.hpp"

namespace growgraph {

void Dataset::validate() const {
  for (const auto& s : samples) {
    if (!s.gso || s.gso->rows() != s.gso->cols() || s.x.rows() != s.gso->rows() ||
        s.y.rows() != s.gso->rows() || static_cast<std::size_t>(s.x.cols()) != input_features ||
        static_cast<std::size_t>(s.y.cols()) != output_features) {
      throw std::invalid_argument("dataset sample shape mismatch");
    }
  }
}

Sample Task::probe(std::size_t, std::uint64_t) const {
  throw std::logic_error("this task does not support gradient-distance probing");
}

SampleGradient sample_gradient(const ParamTensor& params, const Sample& sample,
                               const ActivationPlan& plan, LossKind loss) {
  auto fwd = gnn_forward(params, *sample.gso, sample.x, plan);
  auto l = loss_and_grad(loss, sample.y, fwd.y);
  return {l.value, gnn_backward(fwd.cache, *sample.gso, l.d_yhat, params, plan)};
}

EpochResult sgd_epoch(ParamTensor params, const Dataset& data, const EpochOptions& opts) {
  if (!(opts.eta > 0.0)) throw std::invalid_argument("sgd_epoch: eta must be > 0");
  EpochResult r;
  if (data.size() == 0) {
    r.params = std::move(params);
    return r;
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  if (opts.shuffle) {
    Rng rng = make_rng(opts.seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  auto check = [](const SampleGradient& g, std::size_t index) {
    if (!std::isfinite(g.loss) || !g.grad.all_finite()) {
      throw TrainingError("non-finite loss or gradient at sample " + std::to_string(index), index);
    }
  };

  double loss_sum = 0.0;
  double norm_sum = 0.0;
  if (opts.full_batch) {
    ParamTensor total(params.taps(), params.dims());
    for (std::size_t index : order) {
      auto g = sample_gradient(params, data.samples[index], opts.plan, opts.loss);
      check(g, index);
      loss_sum += g.loss;
      norm_sum += g.grad.norm();
      total += g.grad;
    }
    total *= opts.eta / static_cast<double>(data.size());
    params -= total;
  } else {
    for (std::size_t index : order) {
      auto g = sample_gradient(params, data.samples[index], opts.plan, opts.loss);
      check(g, index);
      loss_sum += g.loss;
      norm_sum += g.grad.norm();
      g.grad *= opts.eta;
      params -= g.grad;
      if (opts.project_margin > 0.0) params = project_nonamplifying(std::move(params), opts.project_margin);
    }
  }
  if (opts.full_batch && opts.project_margin > 0.0) {
    params = project_nonamplifying(std::move(params), opts.project_margin);
  }
  r.params = std::move(params);
  r.mean_loss = loss_sum / static_cast<double>(data.size());
  r.mean_grad_norm = norm_sum / static_cast<double>(data.size());
  return r;
}

void write_train_log_csv(std::ostream& out, const TrainLog& log, bool include_wall_time) {
  out << "epoch,n,mean_loss,mean_grad_norm,grad_dist_est,wall_time_s\n";
  for (const auto& row : log.rows) {
    out << row.epoch << ',' << row.n << ',' << format_double(row.mean_loss) << ','
        << format_double(row.mean_grad_norm) << ','
        << (row.grad_dist_est ? format_double(*row.grad_dist_est) : std::string()) << ','
        << (include_wall_time ? format_double(row.wall_time_s) : std::string()) << '\n';
  }
}

double stopping_threshold(const ParamTensor& params, double c, double epsilon) {
  return gamma_constant(params.layers(), params.max_width(), params.taps()) * c + epsilon;
}

bool adaptive_grow_condition(double grad_dist_est, double epsilon, double grad_norm) {
  return !(grad_dist_est + epsilon < grad_norm);
}

namespace {

constexpr std::uint64_t kShuffleStream = 0x5348;

}  // namespace

TrainResult train_growing(const TrainConfig& config, const Task& task, ParamTensor initial,
                          const ActivationPlan& plan, std::size_t threads) {
  config.validate();
  if (initial.dims().front() != task.input_features() ||
      initial.dims().back() != task.output_features()) {
    throw std::invalid_argument("train_growing: parameter shape does not match the task");
  }
  const bool adaptive = std::holds_alternative<AdaptiveGrowth>(config.growth);
  if (adaptive && !task.supports_probe()) {
    throw ConfigError("adaptive growth needs a task that supports gradient-distance probing");
  }

  TrainResult result;
  result.params = std::move(initial);
  const double threshold = stopping_threshold(result.params, config.c, config.epsilon);
  std::size_t n = config.n0;
  const auto start = std::chrono::steady_clock::now();

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const Dataset data = task.epoch_dataset(n, epoch);
    EpochOptions opts;
    opts.eta = config.eta;
    opts.plan = plan;
    opts.loss = config.loss;
    opts.shuffle = config.shuffle;
    opts.seed = derive_seed(derive_seed(config.seed, kShuffleStream), epoch);
    opts.full_batch = config.full_batch;
    opts.project_margin = config.project_margin;
    auto epoch_result = sgd_epoch(std::move(result.params), data, opts);
    result.params = std::move(epoch_result.params);

    TrainLogRow row;
    row.epoch = epoch;
    row.n = n;
    row.mean_loss = epoch_result.mean_loss;
    row.mean_grad_norm = epoch_result.mean_grad_norm;

    std::size_t next_n = n;
    if (const auto* fixed = std::get_if<FixedIncrement>(&config.growth)) {
      next_n = n + fixed->delta_n;
    } else {
      const auto& a = std::get<AdaptiveGrowth>(config.growth);
      const auto est = grad_distance_estimate(result.params, plan, config.loss, task, n, a.ref_n,
                                              a.trials, derive_seed(config.seed, 0x4744 + epoch),
                                              threads);
      row.grad_dist_est = est.mean;
      if (adaptive_grow_condition(est.mean, a.epsilon, row.mean_grad_norm)) next_n = n + a.delta_n;
    }
    row.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.rows.push_back(row);

    if (row.mean_grad_norm <= threshold) {
      result.stopped_early = true;
      break;
    }
    if (next_n > config.n_max) {
      result.warnings.push_back("epoch " + std::to_string(epoch) + ": growth to " +
                                std::to_string(next_n) + " clamped to n_max " +
                                std::to_string(config.n_max));
      next_n = config.n_max;
    }
    n = next_n;
  }
  return result;
}

GradDistance grad_distance_estimate(const ParamTensor& params, const ActivationPlan& plan,
                                    LossKind loss, const Task& task, std::size_t n,
                                    std::size_t ref_n, std::size_t trials, std::uint64_t seed,
                                    std::size_t threads) {
  if (trials < 1) throw std::invalid_argument("grad_distance_estimate: trials must be >= 1");
  if (ref_n < n) throw std::invalid_argument("grad_distance_estimate: ref_n must be >= n");
  GradDistance r;
  r.per_trial.assign(trials, 0.0);
  parallel_for(trials, threads, [&](std::size_t t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    const Sample small = task.probe(n, trial_seed);
    const Sample large = task.probe(ref_n, trial_seed);
    const auto g_small = sample_gradient(params, small, plan, loss);
    const auto g_large = sample_gradient(params, large, plan, loss);
    r.per_trial[t] = (g_small.grad - g_large.grad).norm();
  });
  double sum = 0.0;
  for (double d : r.per_trial) sum += d;
  r.mean = sum / static_cast<double>(trials);
  std::vector<double> sorted = r.per_trial;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = trials / 2;
  r.median = trials % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return r;
}

}  // namespace growgraph
