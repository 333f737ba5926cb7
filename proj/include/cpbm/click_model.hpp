// The contextual position-based model: P[C=1|q,d,k] = P[E=1|q,k] * P[R=1|q,d].
// Ground-truth bias generation, click simulation, the log-likelihood of a click
// log, and the EM posterior marginals of the latent examination/relevance pair.
#pragma once

#include "cpbm/predictors.hpp"
#include "cpbm/rng.hpp"
#include "cpbm/types.hpp"

#include <functional>
#include <utility>

namespace cpbm {

// Draws w~ with i.i.d. entries uniform on [-eta, eta], then centers:
// w = w~ - mean(w~) * 1, so sum(w) = 0.
GroundTruthBias sample_bias_weights(int dim, double eta, Rng& rng);

// True examination probability 1 / k^max(<w,q> + 1, 0); equals 1 at k=1.
double true_examination_prob(const GroundTruthBias& bias, const Vec& q, int k);

using RelevanceProbFn = std::function<double(const Vec& q, const Vec& d)>;
using ExamProbFn = std::function<double(const Vec& q, int k)>;

// Independent Bernoulli examination and relevance per position; click = e * r.
std::vector<int> simulate_clicks(const Vec& q, const std::vector<Vec>& ranking,
                                 const RelevanceProbFn& relevance_prob,
                                 const ExamProbFn& exam_prob, Rng& rng);

// Log-likelihood of the log under predictors (f, g), Eq.-3 style:
// sum of c*log(f*g) + (1-c)*log(1 - f*g), with f*g clamped.
double click_log_likelihood(const ClickLog& log, const BiasPredictor& f,
                            const RelevancePredictor& g);

// Posterior marginals of the latent (E, R) pair given the click observation:
//   c=1: (1, 1)
//   c=0: pE = f(1-g)/(1-fg),  pR = (1-f)g/(1-fg)
// Inputs fv, gv are clamped before use.
std::pair<double, double> e_step_marginals(int c, double fv, double gv);

}  // namespace cpbm
