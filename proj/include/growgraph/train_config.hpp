#pragma once

#include <cstdint>
#include <variant>

#include <json.hpp>

#include "growgraph/loss.hpp"

namespace growgraph {

/// n grows by delta_n after every epoch (delta_n = 0 gives fixed-size training).
struct FixedIncrement {
  std::size_t delta_n = 0;
};

/// n grows by delta_n only when the measured gradient distance plus epsilon is not strictly
/// below the training gradient norm.
struct AdaptiveGrowth {
  double epsilon = 0.0;
  std::size_t ref_n = 0;
  std::size_t trials = 1;
  std::size_t delta_n = 0;
};

using GrowthSchedule = std::variant<FixedIncrement, AdaptiveGrowth>;

struct TrainConfig {
  double eta = 0.01;
  std::size_t epochs = 1;
  std::size_t n0 = 1;
  std::size_t n_max = 1;
  GrowthSchedule growth = FixedIncrement{};
  double c = 1.0;        ///< spectral threshold in (0,1]
  double epsilon = 0.0;  ///< stopping slack, > 0
  /// User estimate of the Lipschitz constant of the loss gradient; eta must stay below its inverse.
  double lipschitz_estimate = 1.0;
  std::uint64_t seed = 0;
  bool shuffle = true;
  bool full_batch = false;
  LossKind loss = LossKind::HalfMeanSquare;
  /// When > 0, parameters are projected to non-amplifying filters after every update.
  double project_margin = 0.0;

  /// Throws ConfigError on any violated constraint (including eta >= 1/lipschitz_estimate).
  void validate() const;

  /// Strict: unknown keys are an error. "growth" is {"kind": "fixed", "delta_n"} or
  /// {"kind": "adaptive", "epsilon", "ref_n", "trials", "delta_n"}.
  static TrainConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

}  // namespace growgraph
