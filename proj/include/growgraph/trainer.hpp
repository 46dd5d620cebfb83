#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "growgraph/dataset.hpp"
#include "growgraph/loss.hpp"
#include "growgraph/params.hpp"
#include "growgraph/task.hpp"
#include "growgraph/train_config.hpp"

namespace growgraph {

struct EpochResult {
  ParamTensor params;
  double mean_loss = 0.0;
  double mean_grad_norm = 0.0;
};

struct EpochOptions {
  double eta = 0.01;
  ActivationPlan plan;
  LossKind loss = LossKind::HalfMeanSquare;
  bool shuffle = false;
  std::uint64_t seed = 0;
  bool full_batch = false;
  double project_margin = 0.0;  ///< 0 disables projection
};

/// Loss and parameter gradient for one sample.
struct SampleGradient {
  double loss = 0.0;
  ParamTensor grad;
};
SampleGradient sample_gradient(const ParamTensor& params, const Sample& sample,
                               const ActivationPlan& plan, LossKind loss);

/// One pass of per-sample gradient steps H <- H - eta grad (or one averaged step when
/// full_batch). Means are taken over the per-sample losses and gradient norms evaluated before
/// each sample's update. Throws TrainingError naming the sample on non-finite values.
EpochResult sgd_epoch(ParamTensor params, const Dataset& data, const EpochOptions& opts);

struct TrainLogRow {
  std::size_t epoch = 0;
  std::size_t n = 0;
  double mean_loss = 0.0;
  double mean_grad_norm = 0.0;
  std::optional<double> grad_dist_est;
  double wall_time_s = 0.0;
};

struct TrainLog {
  std::vector<TrainLogRow> rows;
};

/// Header `epoch,n,mean_loss,mean_grad_norm,grad_dist_est,wall_time_s`. With
/// include_wall_time = false the last column is left empty so output is reproducible.
void write_train_log_csv(std::ostream& out, const TrainLog& log, bool include_wall_time);

struct TrainResult {
  TrainLog log;
  ParamTensor params;
  bool stopped_early = false;  ///< the gamma*c + epsilon rule fired
  std::vector<std::string> warnings;
};

/// Growing-graph training: an SGD epoch at the current n, then the stopping test
/// (mean gradient norm <= gamma(L,F,K) c + epsilon), then growth and a fresh graph.
TrainResult train_growing(const TrainConfig& config, const Task& task, ParamTensor initial,
                          const ActivationPlan& plan, std::size_t threads = 1);

struct GradDistance {
  double mean = 0.0;
  double median = 0.0;
  std::vector<double> per_trial;  ///< indexed by trial
};

/// Per trial: draw the signal and graphs through task.probe at sizes n and ref_n, evaluate the
/// loss gradient with the same params on both and record the Frobenius distance. The reference
/// graph stands in for the graphon.
GradDistance grad_distance_estimate(const ParamTensor& params, const ActivationPlan& plan,
                                    LossKind loss, const Task& task, std::size_t n,
                                    std::size_t ref_n, std::size_t trials, std::uint64_t seed,
                                    std::size_t threads = 1);

/// True when n must grow: NOT(grad_dist_est + epsilon < grad_norm).
bool adaptive_grow_condition(double grad_dist_est, double epsilon, double grad_norm);

/// Threshold of the stopping rule, gamma(L, max width, K) * c + epsilon.
double stopping_threshold(const ParamTensor& params, double c, double epsilon);

}  // namespace growgraph
