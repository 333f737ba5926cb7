#include "cpbm/dataset.hpp"

#include "cpbm/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace cpbm {

Vec SinbinDataset::sample_context(Rng& rng) const {
  Vec q(theta_q.size());
  for (int i = 0; i < config.dq; ++i) q(i) = rng.uniform();
  return q;
}

double SinbinDataset::relevance_prob(const Vec& q, const Vec& d) const {
  if (q.size() != theta_q.size() || d.size() != theta_d.size())
    throw std::invalid_argument("relevance_prob dimension mismatch");
  return sigmoid(theta_q.dot(q) + theta_d.dot(d));
}

SinbinDataset SinbinDataset::with_device_dims() const {
  SinbinDataset out = *this;
  out.config.dq += 2;
  out.theta_q = Vec::Zero(theta_q.size() + 2);
  out.theta_q.head(theta_q.size()) = theta_q;
  return out;
}

SinbinDataset generate_sinbin(const SinbinConfig& config) {
  if (config.n_items < config.K)
    throw std::invalid_argument("n_items must be >= K");
  Rng rng(config.seed);
  SinbinDataset ds;
  ds.config = config;
  ds.items.resize(config.n_items, config.dd);
  for (int i = 0; i < config.n_items; ++i)
    for (int j = 0; j < config.dd; ++j) ds.items(i, j) = rng.normal();
  const double theta_std = 1.0 / std::sqrt(static_cast<double>(config.dq + config.dd));
  Vec theta(config.dq + config.dd);
  for (int i = 0; i < theta.size(); ++i) theta(i) = theta_std * rng.normal();
  ds.theta_q = theta.head(config.dq);
  ds.theta_d = theta.tail(config.dd);
  return ds;
}

// --- LETOR ingestion ---------------------------------------------------------

std::vector<LetorQuery> parse_letor(std::istream& in) {
  struct SparseItem {
    std::int64_t qid;
    int grade;
    std::vector<std::pair<int, double>> feats;
  };
  std::vector<SparseItem> items;
  std::string line;
  int line_no = 0;
  int max_index = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;  // blank line
    SparseItem item;
    try {
      item.grade = std::stoi(tok);
    } catch (const std::exception&) {
      throw std::runtime_error("letor parse error at line " + std::to_string(line_no) +
                               ": bad grade '" + tok + "'");
    }
    if (!(ss >> tok) || tok.rfind("qid:", 0) != 0)
      throw std::runtime_error("letor parse error at line " + std::to_string(line_no) +
                               ": expected qid:<id>");
    try {
      item.qid = std::stoll(tok.substr(4));
    } catch (const std::exception&) {
      throw std::runtime_error("letor parse error at line " + std::to_string(line_no) +
                               ": bad qid '" + tok + "'");
    }
    while (ss >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("letor parse error at line " + std::to_string(line_no) +
                                 ": expected <index>:<value>, got '" + tok + "'");
      int idx = 0;
      double val = 0.0;
      try {
        idx = std::stoi(tok.substr(0, colon));
        val = std::stod(tok.substr(colon + 1));
      } catch (const std::exception&) {
        throw std::runtime_error("letor parse error at line " + std::to_string(line_no) +
                                 ": bad feature '" + tok + "'");
      }
      if (idx < 0)
        throw std::runtime_error("letor parse error at line " + std::to_string(line_no) +
                                 ": negative feature index");
      max_index = std::max(max_index, idx);
      item.feats.emplace_back(idx, val);
    }
    items.push_back(std::move(item));
  }
  if (items.empty()) throw std::runtime_error("letor input contains no items");

  const int dim = max_index + 1;
  std::vector<LetorQuery> queries;
  std::unordered_map<std::int64_t, std::size_t> index_of;  // group by qid,
  for (auto& item : items) {                               // first-seen order
    auto [it, fresh] = index_of.try_emplace(item.qid, queries.size());
    if (fresh) {
      LetorQuery q;
      q.query_id = item.qid;
      queries.push_back(std::move(q));
    }
    LetorQuery& q = queries[it->second];
    Vec f = Vec::Zero(dim);
    for (const auto& [idx, val] : item.feats) f(idx) = val;
    q.features.push_back(std::move(f));
    q.grades.push_back(item.grade);
    q.binary.push_back(binarize_relevance(item.grade));
  }
  return queries;
}

int binarize_relevance(int grade) {
  if (grade < 0 || grade > 4) throw std::invalid_argument("relevance grade outside 0..4");
  return grade >= 3 ? 1 : 0;
}

std::vector<LetorQuery> filter_relevant(std::vector<LetorQuery> queries) {
  std::erase_if(queries, [](const LetorQuery& q) {
    return std::none_of(q.binary.begin(), q.binary.end(), [](int b) { return b == 1; });
  });
  return queries;
}

void minmax_scale(std::vector<LetorQuery>& queries) {
  if (queries.empty()) return;
  const int dim = static_cast<int>(queries.front().features.front().size());
  Vec lo = Vec::Constant(dim, std::numeric_limits<double>::infinity());
  Vec hi = Vec::Constant(dim, -std::numeric_limits<double>::infinity());
  for (const auto& q : queries)
    for (const auto& f : q.features) {
      lo = lo.cwiseMin(f);
      hi = hi.cwiseMax(f);
    }
  Vec range = hi - lo;
  for (int j = 0; j < dim; ++j)
    if (range(j) <= 0.0) range(j) = 1.0;  // constant feature scales to 0
  for (auto& q : queries)
    for (auto& f : q.features) f = (f - lo).cwiseQuotient(range);
}

namespace {

// Full-batch logistic regression by gradient descent; returns feature weights
// (intercept fitted but not returned — the weights only score features).
Vec fit_logistic(const Mat& X, const std::vector<int>& y, int epochs, double step) {
  Vec w = Vec::Zero(X.cols());
  double b = 0.0;
  const double n = static_cast<double>(X.rows());
  for (int e = 0; e < epochs; ++e) {
    Vec gw = Vec::Zero(X.cols());
    double gb = 0.0;
    for (int i = 0; i < X.rows(); ++i) {
      const double err = sigmoid(X.row(i).dot(w) + b) - y[i];
      gw += err * X.row(i).transpose();
      gb += err;
    }
    w -= (step / n) * gw;
    b -= (step / n) * gb;
  }
  return w;
}

}  // namespace

std::vector<Vec> synthesize_context(const std::vector<LetorQuery>& queries,
                                    double sigma, Rng& rng) {
  if (queries.empty()) throw std::invalid_argument("no queries for context synthesis");
  const int dim = static_cast<int>(queries.front().features.front().size());
  if (dim < 30) throw std::invalid_argument("context synthesis needs >= 30 features");
  const int positions = 10;
  const int n = static_cast<int>(queries.size());

  // Per-query mean item vector (the logistic models' input) and the reward of
  // the item at each position of the true-relevance ranking.
  Mat mean_vec(n, dim);
  Mat reward(n, positions);
  std::vector<std::vector<int>> valid(positions);
  for (int i = 0; i < n; ++i) {
    const auto& q = queries[i];
    Vec mean = Vec::Zero(dim);
    for (const auto& f : q.features) mean += f;
    mean_vec.row(i) = mean / static_cast<double>(q.features.size());
    std::vector<int> order(q.features.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&q](int a, int b) { return q.binary[a] > q.binary[b]; });
    for (int k = 0; k < positions; ++k) {
      if (k < static_cast<int>(order.size())) {
        reward(i, k) = q.binary[order[k]];
        valid[k].push_back(i);
      }
    }
  }

  // Feature scores: s_j = max over positions of |w^k_j|.
  Vec score = Vec::Zero(dim);
  for (int k = 0; k < positions; ++k) {
    if (valid[k].empty()) continue;
    Mat Xk(valid[k].size(), dim);
    std::vector<int> yk(valid[k].size());
    for (std::size_t r = 0; r < valid[k].size(); ++r) {
      Xk.row(r) = mean_vec.row(valid[k][r]);
      yk[r] = static_cast<int>(reward(valid[k][r], k));
    }
    const Vec wk = fit_logistic(Xk, yk, 200, 0.1);
    score = score.cwiseMax(wk.cwiseAbs());
  }

  // 5 uniform picks among the 30 top-scoring features.
  std::vector<int> by_score(dim);
  std::iota(by_score.begin(), by_score.end(), 0);
  std::stable_sort(by_score.begin(), by_score.end(),
                   [&score](int a, int b) { return score(a) > score(b); });
  std::vector<int> pool(by_score.begin(), by_score.begin() + 30);
  std::vector<int> picked;
  for (int i = 0; i < 5; ++i) {
    const auto j = rng.below(pool.size());
    picked.push_back(pool[j]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
  }

  std::vector<Vec> contexts;
  contexts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const auto& q = queries[i];
    Vec rel_mean = Vec::Zero(dim);
    int n_rel = 0;
    for (std::size_t t = 0; t < q.features.size(); ++t)
      if (q.binary[t] == 1) {
        rel_mean += q.features[t];
        ++n_rel;
      }
    if (n_rel == 0)
      throw std::invalid_argument("context synthesis requires relevant items per query");
    rel_mean /= static_cast<double>(n_rel);
    Vec ctx(10);
    for (int p = 0; p < 5; ++p) ctx(p) = rel_mean(picked[p]);
    for (int p = 5; p < 10; ++p) ctx(p) = sigma * rng.normal();
    contexts.push_back(std::move(ctx));
  }
  return contexts;
}

// --- Device experiment -------------------------------------------------------

std::pair<std::vector<Vec>, GroundTruthBias> augment_device(
    const std::vector<Vec>& base_contexts, const DeviceConfig& config, Rng& rng) {
  if (config.device_prob < 0.0 || config.device_prob > 0.5)
    throw std::invalid_argument("device_prob must lie in [0, 0.5]");
  std::vector<Vec> out;
  out.reserve(base_contexts.size());
  for (const auto& q : base_contexts) {
    Vec ext(q.size() + 2);
    const int device = rng.bernoulli(config.device_prob);
    ext << q, (device ? 0.0 : 1.0), (device ? 1.0 : 0.0);
    out.push_back(std::move(ext));
  }
  // Uncentered on purpose: zero weights on the base coordinates plus one-hot
  // device coordinates give exactly two distinct values of <w,q> over the log.
  GroundTruthBias bias;
  bias.eta = config.eta;
  bias.w = Vec::Zero(base_contexts.empty() ? 12 : base_contexts.front().size() + 2);
  bias.w(bias.w.size() - 2) = rng.uniform(-config.eta, config.eta);
  bias.w(bias.w.size() - 1) = rng.uniform(-config.eta, config.eta);
  return {std::move(out), std::move(bias)};
}

// --- Swap randomization ------------------------------------------------------

std::pair<std::vector<int>, SwapAnnotation> apply_swap_randomization(
    const std::vector<int>& order, Rng& rng) {
  const int K = static_cast<int>(order.size());
  if (K < 2) throw std::invalid_argument("swap randomization needs K >= 2");
  SwapAnnotation ann;
  ann.parity = rng.bernoulli(0.5) ? SwapParity::kEven : SwapParity::kOdd;
  std::vector<int> out = order;
  const int first = ann.parity == SwapParity::kOdd ? 1 : 2;  // upper position k
  for (int k = first; k + 1 <= K; k += 2) {
    if (rng.bernoulli(0.5)) {
      std::swap(out[k - 1], out[k]);
      ann.swapped_pairs.push_back(k);
    }
  }
  return {std::move(out), std::move(ann)};
}

}  // namespace cpbm
