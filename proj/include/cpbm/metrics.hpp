// Evaluation: empirical relative error of a bias predictor against the ground
// truth, binary-gain DCG@K, Precision@K, and percentile bootstrap CIs.
#pragma once

#include "cpbm/click_model.hpp"
#include "cpbm/predictors.hpp"
#include "cpbm/rng.hpp"
#include "cpbm/types.hpp"

#include <utility>
#include <vector>

namespace cpbm {

// Mean over contexts of (1/K) * sum_k |1 - f(q,k) / p(E=1|q,k)|. Examination is
// identified only up to scale when learned jointly with relevance, so by
// default the predictor is divided by its own position-1 value first (the
// truth has p(q,1) = 1 exactly).
double relative_error(const BiasPredictor& f, const GroundTruthBias& truth,
                      const std::vector<Vec>& contexts, int K, bool normalize = true);

// Per-context terms of the same mean (bootstrap resampling operates on these).
std::vector<double> relative_error_samples(const BiasPredictor& f,
                                           const GroundTruthBias& truth,
                                           const std::vector<Vec>& contexts, int K,
                                           bool normalize = true);

// Sum over the first K positions of rel_k / log2(k+1), binary gains.
double dcg_at_k(const std::vector<int>& relevances, int K);

// Fraction of the first K positions that are relevant.
double precision_at_k(const std::vector<int>& relevances, int K);

// Percentile bootstrap of the mean: resample with replacement `iterations`
// times, return the (1-level)/2 and (1+level)/2 empirical percentiles.
std::pair<double, double> bootstrap_ci(const std::vector<double>& samples,
                                       int iterations, double level, Rng& rng);

}  // namespace cpbm
