#include "cpbm/click_model.hpp"

#include <cmath>
#include <stdexcept>

namespace cpbm {

GroundTruthBias sample_bias_weights(int dim, double eta, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("bias dimension must be >= 1");
  if (eta < 0.0) throw std::invalid_argument("eta must be nonnegative");
  Vec raw(dim);
  for (int i = 0; i < dim; ++i) raw(i) = rng.uniform(-eta, eta);
  GroundTruthBias bias;
  bias.w = raw.array() - raw.mean();
  bias.eta = eta;
  return bias;
}

double true_examination_prob(const GroundTruthBias& bias, const Vec& q, int k) {
  if (k < 1) throw std::invalid_argument("position must be >= 1");
  const double expo = std::max(bias.w.dot(q) + 1.0, 0.0);
  return 1.0 / std::pow(static_cast<double>(k), expo);
}

std::vector<int> simulate_clicks(const Vec& q, const std::vector<Vec>& ranking,
                                 const RelevanceProbFn& relevance_prob,
                                 const ExamProbFn& exam_prob, Rng& rng) {
  std::vector<int> clicks(ranking.size());
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    const double pe = exam_prob(q, static_cast<int>(k) + 1);
    const double pr = relevance_prob(q, ranking[k]);
    if (pe < 0.0 || pe > 1.0 || pr < 0.0 || pr > 1.0)
      throw std::domain_error("probability outside [0,1] in simulate_clicks");
    const int e = rng.bernoulli(pe);
    const int r = rng.bernoulli(pr);
    clicks[k] = e * r;
  }
  return clicks;
}

double click_log_likelihood(const ClickLog& log, const BiasPredictor& f,
                            const RelevancePredictor& g) {
  if (log.records.empty()) throw std::invalid_argument("empty click log");
  double total = 0.0;
  for (const auto& rec : log.records) {
    const Vec fq = f.curve_for(rec.context);
    for (int k = 0; k < log.K; ++k) {
      const double fg =
          clamp_prob(clamp_prob(fq(k)) * clamp_prob(g.prob(rec.context, rec.items[k])));
      total += rec.clicks[k] ? std::log(fg) : std::log(1.0 - fg);
    }
  }
  return total;
}

std::pair<double, double> e_step_marginals(int c, double fv, double gv) {
  if (c) return {1.0, 1.0};
  const double f = clamp_prob(fv);
  const double g = clamp_prob(gv);
  const double denom = 1.0 - f * g;
  return {f * (1.0 - g) / denom, (1.0 - f) * g / denom};
}

}  // namespace cpbm
