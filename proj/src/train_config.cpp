#include "growgraph/train_config.hpp"

#include "growgraph/errors.hpp"
#include "growgraph/strict_json.hpp"

namespace growgraph {

void TrainConfig::validate() const {
  if (!(eta > 0.0)) throw ConfigError("train.eta must be > 0");
  if (!(lipschitz_estimate > 0.0)) throw ConfigError("train.lipschitz_estimate must be > 0");
  if (!(eta < 1.0 / lipschitz_estimate)) {
    throw ConfigError("train.eta must be < 1/lipschitz_estimate");
  }
  if (n0 < 1) throw ConfigError("train.n0 must be >= 1");
  if (n0 > n_max) throw ConfigError("train.n0 must not exceed train.n_max");
  if (!(c > 0.0 && c <= 1.0)) throw ConfigError("train.c must lie in (0,1]");
  if (!(epsilon > 0.0)) throw ConfigError("train.epsilon must be > 0");
  if (project_margin < 0.0 || project_margin >= 1.0) {
    throw ConfigError("train.project_margin must lie in [0,1)");
  }
  if (const auto* a = std::get_if<AdaptiveGrowth>(&growth)) {
    if (!(a->epsilon >= 0.0)) throw ConfigError("train.growth.epsilon must be >= 0");
    if (a->trials < 1) throw ConfigError("train.growth.trials must be >= 1");
    if (a->ref_n <= n_max) throw ConfigError("train.growth.ref_n must exceed train.n_max");
  }
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  const std::string where = "train";
  strict::require_keys(j,
                       {"eta", "epochs", "n0", "n_max", "growth", "c", "epsilon",
                        "lipschitz_estimate", "seed", "shuffle", "full_batch", "loss",
                        "project_margin"},
                       where);
  TrainConfig t;
  t.eta = strict::number(j, "eta", where);
  t.epochs = strict::unsigned_int(j, "epochs", where);
  t.n0 = strict::unsigned_int(j, "n0", where);
  t.n_max = strict::unsigned_int(j, "n_max", where);
  t.c = strict::number(j, "c", where);
  t.epsilon = strict::number(j, "epsilon", where);
  t.lipschitz_estimate = strict::number(j, "lipschitz_estimate", where);
  t.seed = strict::unsigned_or(j, "seed", 0, where);
  t.shuffle = strict::boolean_or(j, "shuffle", true, where);
  t.full_batch = strict::boolean_or(j, "full_batch", false, where);
  t.project_margin = strict::number_or(j, "project_margin", 0.0, where);
  const auto loss = strict::string_or(j, "loss", "half_mean_square", where);
  if (loss == "half_mean_square") {
    t.loss = LossKind::HalfMeanSquare;
  } else if (loss == "half_square") {
    t.loss = LossKind::HalfSquare;
  } else {
    throw ConfigError("train.loss: unknown loss '" + loss + "'");
  }

  const auto& g = strict::object(j, "growth", where);
  const std::string gw = "train.growth";
  const auto kind = strict::string(g, "kind", gw);
  if (kind == "fixed") {
    strict::require_keys(g, {"kind", "delta_n"}, gw);
    t.growth = FixedIncrement{strict::unsigned_int(g, "delta_n", gw)};
  } else if (kind == "adaptive") {
    strict::require_keys(g, {"kind", "epsilon", "ref_n", "trials", "delta_n"}, gw);
    t.growth = AdaptiveGrowth{strict::number(g, "epsilon", gw), strict::unsigned_int(g, "ref_n", gw),
                              strict::unsigned_int(g, "trials", gw),
                              strict::unsigned_int(g, "delta_n", gw)};
  } else {
    throw ConfigError("train.growth.kind: unknown kind '" + kind + "'");
  }
  t.validate();
  return t;
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json g;
  if (const auto* f = std::get_if<FixedIncrement>(&growth)) {
    g = {{"kind", "fixed"}, {"delta_n", f->delta_n}};
  } else {
    const auto& a = std::get<AdaptiveGrowth>(growth);
    g = {{"kind", "adaptive"},
         {"epsilon", a.epsilon},
         {"ref_n", a.ref_n},
         {"trials", a.trials},
         {"delta_n", a.delta_n}};
  }
  return {{"eta", eta},
          {"epochs", epochs},
          {"n0", n0},
          {"n_max", n_max},
          {"growth", g},
          {"c", c},
          {"epsilon", epsilon},
          {"lipschitz_estimate", lipschitz_estimate},
          {"seed", seed},
          {"shuffle", shuffle},
          {"full_batch", full_batch},
          {"loss", loss == LossKind::HalfMeanSquare ? "half_mean_square" : "half_square"},
          {"project_margin", project_margin}};
}

}  // namespace growgraph
