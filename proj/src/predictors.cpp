#include "cpbm/predictors.hpp"

#include <stdexcept>

namespace cpbm {

double BiasPredictor::prob(const Vec& q, int k) const {
  return curve_for(q)(k - 1);
}

Vec BiasPredictor::curve_for(const Vec& q) const {
  Vec out;
  switch (kind) {
    case PredictorKind::kConstantCurve:
      out = curve;
      break;
    case PredictorKind::kContextualNetwork:
      out = mlp_forward(*net, q);
      break;
    case PredictorKind::kPartitionedCurve: {
      const auto it = partition_curves.find(partition(q));
      if (it == partition_curves.end())
        throw std::runtime_error("no fitted curve for partition label");
      out = it->second;
      break;
    }
  }
  // Predictions live in (0,1]; clamp below so downstream ratios stay finite.
  return out.cwiseMax(kProbClamp).cwiseMin(1.0);
}

int BiasPredictor::positions() const {
  switch (kind) {
    case PredictorKind::kConstantCurve:
      return static_cast<int>(curve.size());
    case PredictorKind::kContextualNetwork:
      return net->output_dim;
    case PredictorKind::kPartitionedCurve:
      return static_cast<int>(partition_curves.begin()->second.size());
  }
  return 0;
}

BiasPredictor BiasPredictor::flat(int K) {
  return from_curve(Vec::Ones(K));
}

BiasPredictor BiasPredictor::from_curve(Vec curve) {
  BiasPredictor p;
  p.kind = PredictorKind::kConstantCurve;
  p.curve = std::move(curve);
  return p;
}

BiasPredictor BiasPredictor::from_net(MlpModel m) {
  BiasPredictor p;
  p.kind = PredictorKind::kContextualNetwork;
  p.net = std::move(m);
  return p;
}

double RelevancePredictor::prob(const Vec& q, const Vec& d) const {
  Vec x(q.size() + d.size());
  x << q, d;
  return mlp_forward(net, x)(0);
}

}  // namespace cpbm
