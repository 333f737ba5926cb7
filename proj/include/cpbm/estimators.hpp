// Position-bias estimators behind one interface: fit a click log, return a
// bias predictor (and where applicable a relevance predictor).
//
//  - ctr_estimate          clicks per position, normalized by position 1
//  - swap_estimate         chained adjacent-pair ratios over randomized logs
//  - regression_em_fit     EM with a constant examination curve (closed-form
//                          per-epoch update) and a learned relevance network
//  - contextual_em_fit     the contextual EM-based regression (modes: EM draws
//                          Bernoulli targets with BCE; PEM regresses on the
//                          marginals with MSE)
//  - generative_fit        direct joint likelihood ascent on f and g, no E-step
//  - semi_contextual_fit   any non-contextual base fitted per data partition
#pragma once

#include "cpbm/mlp.hpp"
#include "cpbm/predictors.hpp"
#include "cpbm/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>

namespace cpbm {

enum class EmMode { kEm, kPem };

struct EmConfig {
  int epochs = 50;      // one shuffled pass over the log per epoch
  int mini_batch = 20;  // records per gradient step
  EmMode mode = EmMode::kEm;
  std::uint64_t seed = 0;
};

struct FitResult {
  BiasPredictor bias;
  RelevancePredictor relevance;
};

BiasPredictor ctr_estimate(const ClickLog& log);

BiasPredictor swap_estimate(const ClickLog& log);

FitResult contextual_em_fit(const ClickLog& log, const EmConfig& config);

FitResult regression_em_fit(const ClickLog& log, const EmConfig& config);

FitResult generative_fit(const ClickLog& log, const EmConfig& config);

using PartitionFn = std::function<std::string(const Vec&)>;
using BaseEstimator = std::function<BiasPredictor(const ClickLog&)>;

// Fits `base` independently on each partition of the log (records grouped by
// the label of their context); the returned predictor dispatches on the label.
BiasPredictor semi_contextual_fit(const ClickLog& log, const PartitionFn& partition,
                                  const BaseEstimator& base);

// Partition label for the device experiment: reads the trailing one-hot pair.
std::string device_partition_label(const Vec& q);

}  // namespace cpbm
