// PBM-aware linear Thompson sampling over [q; d] features. Serves rankings by
// posterior sampling on a Bayesian ridge model and learns from clicks weighted
// by inverse examination propensities: with propensity p and click c, the
// update A += p^2 x x^T, b += p^2 x (c/p) is the IPS-weighted least-squares
// normal-equation increment, and reduces exactly to plain ridge when p = 1.
#pragma once

#include "cpbm/click_model.hpp"
#include "cpbm/dataset.hpp"
#include "cpbm/predictors.hpp"
#include "cpbm/rng.hpp"
#include "cpbm/types.hpp"

#include <functional>
#include <vector>

namespace cpbm {

struct LinTsConfig {
  double lambda = 1.0;   // ridge prior scale, A starts at lambda * I
  double sigma_n = 1.0;  // posterior noise scale
};

struct LinTsState {
  Mat A;  // (dq+dd) x (dq+dd), symmetric positive definite
  Vec b;
  LinTsConfig config;
};

LinTsState make_lin_ts(int feature_dim, const LinTsConfig& config);

// Samples theta ~ Normal(A^-1 b, sigma_n^2 A^-1) via the Cholesky factor of A
// (no explicit inverse), scores candidates by <theta, [q; d]>, and returns the
// indices of the top K by score, ties broken by candidate index ascending.
std::vector<int> rank(const LinTsState& state, const Vec& q, const Mat& candidates,
                      int K, Rng& rng);

// IPS-weighted update from one impression; items are the presented features in
// display order, clicks the observed click vector, bias supplies propensities.
void update(LinTsState& state, const Vec& q, const std::vector<Vec>& items,
            const std::vector<int>& clicks, const BiasPredictor& bias);

// One online-LTR step's evaluation row: quality of the presented ranking
// against the true relevance draws of that impression.
struct LtrRow {
  int query_index = 0;
  double dcg_at_k = 0.0;
  double precision_at_k = 0.0;
};

// A query environment for the online loop: yields per-query (context,
// candidate features, per-candidate true relevance probability).
struct LtrQuery {
  Vec context;
  Mat candidates;  // n x dd
  Vec rel_prob;    // n
};
using LtrEnvironment = std::function<LtrQuery(Rng&)>;

// Trains the ranker online for n_queries steps: rank -> simulate clicks under
// the true bias -> IPS-update with the supplied bias predictor. Records DCG@K
// and Precision@K of each presented ranking against that impression's true
// relevance draws (not clicks).
std::vector<LtrRow> run_online_ltr(const LtrEnvironment& env, const BiasPredictor& bias,
                                   int n_queries, const GroundTruthBias& true_bias,
                                   int K, const LinTsConfig& config, Rng& rng);

// Adapters to the two dataset kinds. The synthetic environment draws a fresh
// context per step over the full item pool; the LETOR environment draws one of
// the ingested queries uniformly, with its synthesized context and own items.
LtrEnvironment sinbin_environment(const SinbinDataset& ds);
LtrEnvironment letor_environment(const std::vector<LetorQuery>& queries,
                                 const std::vector<Vec>& contexts);

}  // namespace cpbm
