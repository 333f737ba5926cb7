#include "cpbm/estimators.hpp"

#include "cpbm/click_model.hpp"
#include "cpbm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace cpbm {
namespace {

// Column-major staging of a log for batched fits: contexts Q (dq x N),
// relevance inputs Xg ((dq+dd) x N*K, column n*K+k = [q_n; d_{n,k}]),
// clicks C (K x N).
struct EmData {
  Mat Q;
  Mat Xg;
  Mat C;
  int N = 0;
  int K = 0;
};

EmData stage(const ClickLog& log) {
  if (log.records.empty()) throw std::invalid_argument("empty click log");
  EmData d;
  d.N = static_cast<int>(log.records.size());
  d.K = log.K;
  d.Q.resize(log.dq, d.N);
  d.Xg.resize(log.dq + log.dd, static_cast<Eigen::Index>(d.N) * d.K);
  d.C.resize(d.K, d.N);
  for (int n = 0; n < d.N; ++n) {
    const auto& rec = log.records[n];
    d.Q.col(n) = rec.context;
    for (int k = 0; k < d.K; ++k) {
      d.Xg.col(static_cast<Eigen::Index>(n) * d.K + k) << rec.context, rec.items[k];
      d.C(k, n) = rec.clicks[k];
    }
  }
  return d;
}

Mat clamp_mat(const Mat& P) {
  return P.unaryExpr([](double p) { return clamp_prob(p); });
}

// Gathers the batch slices for the record indices in `idx`.
struct Batch {
  Mat Q;    // dq x B
  Mat Xg;   // (dq+dd) x B*K
  Mat C;    // K x B
  int B = 0;
};

Batch gather(const EmData& d, const std::vector<int>& order, int start, int stop) {
  Batch b;
  b.B = stop - start;
  b.Q.resize(d.Q.rows(), b.B);
  b.Xg.resize(d.Xg.rows(), static_cast<Eigen::Index>(b.B) * d.K);
  b.C.resize(d.K, b.B);
  for (int j = 0; j < b.B; ++j) {
    const int n = order[start + j];
    b.Q.col(j) = d.Q.col(n);
    b.Xg.middleCols(static_cast<Eigen::Index>(j) * d.K, d.K) =
        d.Xg.middleCols(static_cast<Eigen::Index>(n) * d.K, d.K);
    b.C.col(j) = d.C.col(n);
  }
  return b;
}

// Reshapes g's flat outputs (1 x B*K) to positions-by-records (K x B).
Mat by_position(const Mat& flat, int K, int B) {
  return Eigen::Map<const Mat>(flat.data(), K, B);
}

// E-step posterior of examination given no-click, vectorized Eq. 4.
Mat exam_posterior(const Mat& C, const Mat& Fv, const Mat& Gv) {
  const Mat ones = Mat::Ones(C.rows(), C.cols());
  const Mat no_click = Fv.cwiseProduct(ones - Gv).cwiseQuotient(ones - Fv.cwiseProduct(Gv));
  return C + (ones - C).cwiseProduct(no_click);
}

// E-step posterior of relevance given no-click, vectorized Eq. 5.
Mat rel_posterior(const Mat& C, const Mat& Fv, const Mat& Gv) {
  const Mat ones = Mat::Ones(C.rows(), C.cols());
  const Mat no_click = (ones - Fv).cwiseProduct(Gv).cwiseQuotient(ones - Fv.cwiseProduct(Gv));
  return C + (ones - C).cwiseProduct(no_click);
}

Mat draw_bernoulli(const Mat& P, Rng& rng) {
  Mat out(P.rows(), P.cols());
  for (Eigen::Index j = 0; j < P.cols(); ++j)
    for (Eigen::Index i = 0; i < P.rows(); ++i) out(i, j) = rng.bernoulli(P(i, j));
  return out;
}

struct Nets {
  MlpModel f;
  MlpModel g;
  AdamState sf;
  AdamState sg;
};

Nets make_nets(int dq, int dd, int K, Rng& rng) {
  Nets n;
  n.f = make_mlp(dq, 2 * K, K, rng);
  n.g = make_mlp(dq + dd, (dq + dd + 1) / 2, 1, rng);
  n.sf = make_adam(n.f);
  n.sg = make_adam(n.g);
  return n;
}

std::vector<int> shuffled_order(int N, Rng& rng) {
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());
  return order;
}

void check_config(const EmConfig& config) {
  if (config.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (config.mini_batch < 1) throw std::invalid_argument("mini_batch must be >= 1");
}

}  // namespace

BiasPredictor ctr_estimate(const ClickLog& log) {
  if (log.records.empty()) throw std::invalid_argument("empty click log");
  Vec clicks = Vec::Zero(log.K);
  for (const auto& rec : log.records)
    for (int k = 0; k < log.K; ++k) clicks(k) += rec.clicks[k];
  if (clicks(0) <= 0.0)
    throw std::runtime_error("ctr estimate undefined: no clicks at position 1");
  // Equal impression counts per position cancel; the ratio of click counts is
  // the ratio of click rates.
  Vec curve = clicks / clicks(0);
  return BiasPredictor::from_curve(curve.cwiseMax(kProbClamp).cwiseMin(1.0));
}

BiasPredictor swap_estimate(const ClickLog& log) {
  if (log.records.empty()) throw std::invalid_argument("empty click log");
  // clicks_upper/clicks_lower over records whose parity put (k, k+1) under
  // randomization; indexing is by the pair's upper position k (1-based).
  Vec upper = Vec::Zero(log.K - 1), lower = Vec::Zero(log.K - 1);
  for (const auto& rec : log.records) {
    if (!rec.swap)
      throw std::runtime_error("swap estimate requires swap annotations on every record");
    const int first = rec.swap->parity == SwapParity::kOdd ? 1 : 2;
    for (int k = first; k + 1 <= log.K; k += 2) {
      upper(k - 1) += rec.clicks[k - 1];
      lower(k - 1) += rec.clicks[k];
    }
  }
  Vec curve(log.K);
  curve(0) = 1.0;
  for (int k = 1; k < log.K; ++k) {
    if (upper(k - 1) <= 0.0)
      throw std::runtime_error("swap estimate: no clicks at the upper slot of pair (" +
                               std::to_string(k) + "," + std::to_string(k + 1) + ")");
    curve(k) = curve(k - 1) * lower(k - 1) / upper(k - 1);
  }
  return BiasPredictor::from_curve(curve.cwiseMax(kProbClamp).cwiseMin(1.0));
}

FitResult contextual_em_fit(const ClickLog& log, const EmConfig& config) {
  check_config(config);
  const EmData data = stage(log);
  Rng rng(config.seed);
  Nets nets = make_nets(log.dq, log.dd, log.K, rng);
  const LossKind loss = config.mode == EmMode::kEm ? LossKind::kBce : LossKind::kMse;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = shuffled_order(data.N, rng);
    for (int start = 0; start < data.N; start += config.mini_batch) {
      const int stop = std::min(data.N, start + config.mini_batch);
      const Batch batch = gather(data, order, start, stop);
      // E-step for examination with the current models.
      const Mat Pf = mlp_forward(nets.f, batch.Q);
      const Mat Pg = mlp_forward(nets.g, batch.Xg);
      const Mat Fv = clamp_mat(Pf);
      const Mat Gv = clamp_mat(by_position(Pg, data.K, batch.B));
      const Mat pe = exam_posterior(batch.C, Fv, Gv);
      const Mat tf = config.mode == EmMode::kEm ? draw_bernoulli(pe, rng) : pe;
      adam_step(nets.f,
                mlp_loss_grad(nets.f, batch.Q, tf, Mat::Ones(tf.rows(), tf.cols()), loss),
                nets.sf);
      // Relevance targets use the just-updated f (Algorithm-1 ordering).
      const Mat Fv2 = clamp_mat(mlp_forward(nets.f, batch.Q));
      const Mat pr = rel_posterior(batch.C, Fv2, Gv);
      Mat tg = Eigen::Map<const Mat>(pr.data(), 1, pr.size());
      if (config.mode == EmMode::kEm) tg = draw_bernoulli(tg, rng);
      adam_step(nets.g,
                mlp_loss_grad(nets.g, batch.Xg, tg, Mat::Ones(1, tg.cols()), loss),
                nets.sg);
    }
  }
  return {BiasPredictor::from_net(std::move(nets.f)),
          RelevancePredictor{std::move(nets.g)}};
}

FitResult regression_em_fit(const ClickLog& log, const EmConfig& config) {
  check_config(config);
  const EmData data = stage(log);
  Rng rng(config.seed);
  Nets nets = make_nets(log.dq, log.dd, log.K, rng);
  const LossKind loss = config.mode == EmMode::kEm ? LossKind::kBce : LossKind::kMse;
  Vec curve = Vec::Constant(log.K, 0.5);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = shuffled_order(data.N, rng);
    Vec acc = Vec::Zero(log.K);
    for (int start = 0; start < data.N; start += config.mini_batch) {
      const int stop = std::min(data.N, start + config.mini_batch);
      const Batch batch = gather(data, order, start, stop);
      const Mat Fv = clamp_mat(curve.replicate(1, batch.B));
      const Mat Pg = mlp_forward(nets.g, batch.Xg);
      const Mat Gv = clamp_mat(by_position(Pg, data.K, batch.B));
      acc += exam_posterior(batch.C, Fv, Gv).rowwise().sum();
      const Mat pr = rel_posterior(batch.C, Fv, Gv);
      Mat tg = Eigen::Map<const Mat>(pr.data(), 1, pr.size());
      if (config.mode == EmMode::kEm) tg = draw_bernoulli(tg, rng);
      adam_step(nets.g,
                mlp_loss_grad(nets.g, batch.Xg, tg, Mat::Ones(1, tg.cols()), loss),
                nets.sg);
    }
    // Closed-form examination update once per epoch: mean posterior by position.
    curve = (acc / static_cast<double>(data.N))
                .cwiseMax(kProbClamp)
                .cwiseMin(1.0);
  }
  return {BiasPredictor::from_curve(std::move(curve)),
          RelevancePredictor{std::move(nets.g)}};
}

FitResult generative_fit(const ClickLog& log, const EmConfig& config) {
  check_config(config);
  const EmData data = stage(log);
  Rng rng(config.seed);
  Nets nets = make_nets(log.dq, log.dd, log.K, rng);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = shuffled_order(data.N, rng);
    for (int start = 0; start < data.N; start += config.mini_batch) {
      const int stop = std::min(data.N, start + config.mini_batch);
      const Batch batch = gather(data, order, start, stop);
      const MlpForward ff = mlp_forward_cached(nets.f, batch.Q);
      const MlpForward fg = mlp_forward_cached(nets.g, batch.Xg);
      const Mat Fv = clamp_mat(ff.P);
      const Mat Gv = clamp_mat(by_position(fg.P, data.K, batch.B));
      const Mat FG = clamp_mat(Fv.cwiseProduct(Gv));
      // d(BCE of the product)/d(product), averaged per record for f and per
      // sample for g; both factors stepped from the same forward pass.
      const Mat ones = Mat::Ones(FG.rows(), FG.cols());
      const Mat base = (FG - batch.C).cwiseQuotient(FG.cwiseProduct(ones - FG));
      const Mat dF = base.cwiseProduct(Gv) / batch.B;
      const Mat dG_pos = base.cwiseProduct(Fv) / (static_cast<double>(batch.B) * data.K);
      const Mat dG = Eigen::Map<const Mat>(dG_pos.data(), 1, dG_pos.size());
      const MlpGrads gf = mlp_backward(nets.f, batch.Q, ff, dF);
      const MlpGrads gg = mlp_backward(nets.g, batch.Xg, fg, dG);
      adam_step(nets.f, gf, nets.sf);
      adam_step(nets.g, gg, nets.sg);
    }
  }
  return {BiasPredictor::from_net(std::move(nets.f)),
          RelevancePredictor{std::move(nets.g)}};
}

BiasPredictor semi_contextual_fit(const ClickLog& log, const PartitionFn& partition,
                                  const BaseEstimator& base) {
  if (log.records.empty()) throw std::invalid_argument("empty click log");
  std::map<std::string, ClickLog> parts;
  for (const auto& rec : log.records) {
    auto& part = parts[partition(rec.context)];
    if (part.records.empty()) {
      part.K = log.K;
      part.dq = log.dq;
      part.dd = log.dd;
      part.seed = log.seed;
      part.config_hash = log.config_hash;
    }
    part.records.push_back(rec);
  }
  BiasPredictor out;
  out.kind = PredictorKind::kPartitionedCurve;
  out.partition = partition;
  for (auto& [label, part] : parts) {
    const BiasPredictor fitted = base(part);
    if (fitted.kind != PredictorKind::kConstantCurve)
      throw std::invalid_argument("semi-contextual base must be non-contextual");
    out.partition_curves[label] = fitted.curve;
  }
  return out;
}

std::string device_partition_label(const Vec& q) {
  return q(q.size() - 2) == 1.0 ? "device0" : "device1";
}

}  // namespace cpbm
