#include "cpbm/lin_ts.hpp"

#include "cpbm/metrics.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cpbm {

LinTsState make_lin_ts(int feature_dim, const LinTsConfig& config) {
  if (feature_dim < 1) throw std::invalid_argument("feature dimension must be >= 1");
  LinTsState s;
  s.A = config.lambda * Mat::Identity(feature_dim, feature_dim);
  s.b = Vec::Zero(feature_dim);
  s.config = config;
  return s;
}

std::vector<int> rank(const LinTsState& state, const Vec& q, const Mat& candidates,
                      int K, Rng& rng) {
  const int n = static_cast<int>(candidates.rows());
  if (n < K) throw std::invalid_argument("fewer candidates than K");
  const Eigen::LLT<Mat> llt(state.A);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("precision matrix is not positive definite");
  // theta = A^-1 b + sigma_n * L^-T z  has covariance sigma_n^2 A^-1.
  Vec z(state.A.rows());
  for (int i = 0; i < z.size(); ++i) z(i) = rng.normal();
  const Vec theta = llt.solve(state.b) +
                    state.config.sigma_n *
                        llt.matrixU().solve(z);
  const Vec scores = candidates * theta.tail(candidates.cols()) +
                     Vec::Constant(n, theta.head(q.size()).dot(q));
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + K, idx.end(), [&scores](int a, int b) {
    return scores(a) != scores(b) ? scores(a) > scores(b) : a < b;
  });
  idx.resize(K);
  return idx;
}

void update(LinTsState& state, const Vec& q, const std::vector<Vec>& items,
            const std::vector<int>& clicks, const BiasPredictor& bias) {
  const Vec props = bias.curve_for(q);  // clamped to (0,1] by the predictor
  for (std::size_t k = 0; k < items.size(); ++k) {
    Vec x(q.size() + items[k].size());
    x << q, items[k];
    const double p = props(static_cast<int>(k));
    state.A.noalias() += (p * p) * x * x.transpose();
    state.b.noalias() += (p * p) * x * (clicks[k] / p);
  }
}

std::vector<LtrRow> run_online_ltr(const LtrEnvironment& env, const BiasPredictor& bias,
                                   int n_queries, const GroundTruthBias& true_bias,
                                   int K, const LinTsConfig& config, Rng& rng) {
  std::vector<LtrRow> rows;
  rows.reserve(n_queries);
  LinTsState state;
  bool initialized = false;
  for (int t = 0; t < n_queries; ++t) {
    const LtrQuery query = env(rng);
    if (!initialized) {
      state = make_lin_ts(static_cast<int>(query.context.size() + query.candidates.cols()),
                          config);
      initialized = true;
    }
    const std::vector<int> top = rank(state, query.context, query.candidates, K, rng);
    std::vector<Vec> shown;
    shown.reserve(K);
    for (int id : top) shown.push_back(query.candidates.row(id).transpose());
    // Examination and relevance draws; the click is their product, the metric
    // sees the relevance draw.
    std::vector<int> clicks(K), rels(K);
    for (int k = 0; k < K; ++k) {
      const double pe = true_examination_prob(true_bias, query.context, k + 1);
      const int e = rng.bernoulli(pe);
      const int r = rng.bernoulli(query.rel_prob(top[k]));
      clicks[k] = e * r;
      rels[k] = r;
    }
    update(state, query.context, shown, clicks, bias);
    rows.push_back({t, dcg_at_k(rels, K), precision_at_k(rels, K)});
  }
  return rows;
}

LtrEnvironment sinbin_environment(const SinbinDataset& ds) {
  return [&ds](Rng& rng) {
    LtrQuery q;
    q.context = ds.sample_context(rng);
    q.candidates = ds.items;
    q.rel_prob.resize(ds.items.rows());
    for (int i = 0; i < ds.items.rows(); ++i)
      q.rel_prob(i) = ds.relevance_prob(q.context, ds.items.row(i).transpose());
    return q;
  };
}

LtrEnvironment letor_environment(const std::vector<LetorQuery>& queries,
                                 const std::vector<Vec>& contexts) {
  if (queries.size() != contexts.size())
    throw std::invalid_argument("queries/contexts size mismatch");
  return [&queries, &contexts](Rng& rng) {
    const auto i = rng.below(queries.size());
    const auto& src = queries[i];
    LtrQuery q;
    q.context = contexts[i];
    q.candidates.resize(src.features.size(), src.features.front().size());
    q.rel_prob.resize(src.features.size());
    for (std::size_t t = 0; t < src.features.size(); ++t) {
      q.candidates.row(t) = src.features[t].transpose();
      q.rel_prob(t) = src.binary[t];
    }
    return q;
  };
}

}  // namespace cpbm
