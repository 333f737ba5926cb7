#include "cpbm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpbm {

double relative_error(const BiasPredictor& f, const GroundTruthBias& truth,
                      const std::vector<Vec>& contexts, int K, bool normalize) {
  if (contexts.empty()) throw std::invalid_argument("relative_error needs contexts");
  double total = 0.0;
  for (const auto& q : contexts) {
    Vec pred = f.curve_for(q);
    if (normalize) pred /= pred(0);
    double per_query = 0.0;
    for (int k = 1; k <= K; ++k)
      per_query += std::abs(1.0 - pred(k - 1) / true_examination_prob(truth, q, k));
    total += per_query / K;
  }
  return total / static_cast<double>(contexts.size());
}

double dcg_at_k(const std::vector<int>& relevances, int K) {
  if (static_cast<int>(relevances.size()) < K)
    throw std::invalid_argument("relevance vector shorter than K");
  double dcg = 0.0;
  for (int k = 1; k <= K; ++k)
    dcg += relevances[k - 1] / std::log2(static_cast<double>(k) + 1.0);
  return dcg;
}

double precision_at_k(const std::vector<int>& relevances, int K) {
  if (static_cast<int>(relevances.size()) < K)
    throw std::invalid_argument("relevance vector shorter than K");
  int hits = 0;
  for (int k = 0; k < K; ++k) hits += relevances[k];
  return static_cast<double>(hits) / K;
}

std::pair<double, double> bootstrap_ci(const std::vector<double>& samples,
                                       int iterations, double level, Rng& rng) {
  if (samples.empty()) throw std::invalid_argument("bootstrap_ci needs samples");
  const auto n = samples.size();
  std::vector<double> means(iterations);
  for (int it = 0; it < iterations; ++it) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += samples[rng.below(n)];
    means[it] = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const auto pick = [&means](double p) {
    const auto last = means.size() - 1;
    const auto pos = static_cast<std::size_t>(std::llround(p * static_cast<double>(last)));
    return means[std::min(pos, last)];
  };
  return {pick((1.0 - level) / 2.0), pick((1.0 + level) / 2.0)};
}

}  // namespace cpbm
