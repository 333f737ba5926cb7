// Minimal neural machinery: single-hidden-layer sigmoid MLPs, exact analytic
// gradients (BCE / MSE, optional per-coordinate weights), and ADAM updates.
// All passes are batched: inputs are (input_dim x batch) matrices, outputs
// (output_dim x batch). Estimator loops that need custom output gradients use
// mlp_backward directly.
#pragma once

#include "cpbm/rng.hpp"
#include "cpbm/types.hpp"

namespace cpbm {

struct MlpModel {
  int input_dim = 0;
  int hidden_dim = 0;
  int output_dim = 0;
  Mat W1;  // hidden_dim x input_dim
  Vec b1;  // hidden_dim
  Mat W2;  // output_dim x hidden_dim
  Vec b2;  // output_dim
};

struct MlpGrads {
  Mat gW1;
  Vec gb1;
  Mat gW2;
  Vec gb2;
};

// ADAM accumulators shaped like the parameters, with the standard defaults.
struct AdamState {
  Mat mW1, vW1, mW2, vW2;
  Vec mb1, vb1, mb2, vb2;
  long t = 0;
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

enum class LossKind { kBce, kMse };

// Cached activations of one forward pass (needed by the backward pass).
struct MlpForward {
  Mat H;  // hidden activations, hidden_dim x batch
  Mat P;  // sigmoid outputs, output_dim x batch
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Elementwise probability clamp to [eps, 1-eps] used before logs and ratios.
constexpr double kProbClamp = 1e-6;
inline double clamp_prob(double p) {
  return p < kProbClamp ? kProbClamp : (p > 1.0 - kProbClamp ? 1.0 - kProbClamp : p);
}

// Symmetric uniform initialization +-sqrt(6/(fan_in+fan_out)), zero biases.
MlpModel make_mlp(int input_dim, int hidden_dim, int output_dim, Rng& rng);

MlpForward mlp_forward_cached(const MlpModel& m, const Mat& X);
Mat mlp_forward(const MlpModel& m, const Mat& X);
Vec mlp_forward(const MlpModel& m, const Vec& x);

// Gradients of an arbitrary scalar loss given dL/dP (same shape as P).
MlpGrads mlp_backward(const MlpModel& m, const Mat& X, const MlpForward& fwd,
                      const Mat& dLdP);

// Mean loss over the batch: (1/batch) * sum over columns and coordinates of
// weight .* loss(P, target). Weights mask coordinates (pass all-ones if unused).
double mlp_loss(const MlpModel& m, const Mat& X, const Mat& targets,
                const Mat& weights, LossKind kind);

// Exact analytic gradients of mlp_loss.
MlpGrads mlp_loss_grad(const MlpModel& m, const Mat& X, const Mat& targets,
                       const Mat& weights, LossKind kind);

AdamState make_adam(const MlpModel& m);

// Standard bias-corrected ADAM update, in place. Throws on non-finite grads.
void adam_step(MlpModel& m, const MlpGrads& g, AdamState& s);

}  // namespace cpbm
