// Fitted predictor interfaces shared by all estimators. A BiasPredictor maps
// (q, k) to an examination probability; non-contextual fits carry a constant
// K-vector curve, contextual fits carry a K-output network, and semi-contextual
// fits dispatch a per-partition curve on a context attribute.
#pragma once

#include "cpbm/mlp.hpp"
#include "cpbm/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace cpbm {

enum class PredictorKind { kConstantCurve, kContextualNetwork, kPartitionedCurve };

struct BiasPredictor {
  PredictorKind kind = PredictorKind::kConstantCurve;
  Vec curve;                      // kConstantCurve: K probabilities
  std::optional<MlpModel> net;    // kContextualNetwork: dq -> K
  std::function<std::string(const Vec&)> partition;  // kPartitionedCurve
  std::map<std::string, Vec> partition_curves;

  // Examination probability for position k (1-based), clamped to (0,1].
  double prob(const Vec& q, int k) const;

  // All K positions at once (one forward pass for network predictors).
  Vec curve_for(const Vec& q) const;

  int positions() const;

  static BiasPredictor flat(int K);
  static BiasPredictor from_curve(Vec curve);
  static BiasPredictor from_net(MlpModel m);
};

struct RelevancePredictor {
  MlpModel net;  // (dq+dd) -> 1

  double prob(const Vec& q, const Vec& d) const;
};

}  // namespace cpbm
