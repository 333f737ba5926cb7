#include "cpbm/mlp.hpp"

#include <stdexcept>

namespace cpbm {
namespace {

Mat sigmoid_mat(const Mat& Z) {
  return Z.unaryExpr([](double z) { return sigmoid(z); });
}

Mat clamp_mat(const Mat& P) {
  return P.unaryExpr([](double p) { return clamp_prob(p); });
}

void check_finite(const Mat& g, const char* what) {
  if (!g.allFinite()) throw std::runtime_error(std::string("non-finite gradient: ") + what);
}

template <typename T>
void adam_update(T& param, const T& grad, T& mm, T& vv, const AdamState& s) {
  mm = s.beta1 * mm + (1.0 - s.beta1) * grad;
  vv = s.beta2 * vv + (1.0 - s.beta2) * grad.cwiseProduct(grad).eval();
  const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  param.array() -=
      s.alpha * (mm.array() / bc1) / ((vv.array() / bc2).sqrt() + s.eps);
}

}  // namespace

MlpModel make_mlp(int input_dim, int hidden_dim, int output_dim, Rng& rng) {
  if (input_dim < 1 || hidden_dim < 1 || output_dim < 1)
    throw std::invalid_argument("mlp dimensions must be positive");
  MlpModel m;
  m.input_dim = input_dim;
  m.hidden_dim = hidden_dim;
  m.output_dim = output_dim;
  const auto fill = [&rng](Mat& W, int rows, int cols) {
    const double lim = std::sqrt(6.0 / (rows + cols));
    W.resize(rows, cols);
    for (int j = 0; j < cols; ++j)      // column-major fill, stable draw order
      for (int i = 0; i < rows; ++i) W(i, j) = rng.uniform(-lim, lim);
  };
  fill(m.W1, hidden_dim, input_dim);
  fill(m.W2, output_dim, hidden_dim);
  m.b1 = Vec::Zero(hidden_dim);
  m.b2 = Vec::Zero(output_dim);
  return m;
}

MlpForward mlp_forward_cached(const MlpModel& m, const Mat& X) {
  if (X.rows() != m.input_dim) throw std::invalid_argument("mlp input dimension mismatch");
  MlpForward f;
  f.H = sigmoid_mat((m.W1 * X).colwise() + m.b1);
  f.P = sigmoid_mat((m.W2 * f.H).colwise() + m.b2);
  return f;
}

Mat mlp_forward(const MlpModel& m, const Mat& X) { return mlp_forward_cached(m, X).P; }

Vec mlp_forward(const MlpModel& m, const Vec& x) {
  return mlp_forward(m, Mat(x)).col(0);
}

MlpGrads mlp_backward(const MlpModel& m, const Mat& X, const MlpForward& fwd,
                      const Mat& dLdP) {
  // dZ2 = dL/dP .* P(1-P); chain through the output sigmoid.
  const Mat dZ2 = dLdP.cwiseProduct(fwd.P.cwiseProduct(Mat::Ones(fwd.P.rows(), fwd.P.cols()) - fwd.P));
  MlpGrads g;
  g.gW2 = dZ2 * fwd.H.transpose();
  g.gb2 = dZ2.rowwise().sum();
  const Mat dH = m.W2.transpose() * dZ2;
  const Mat dZ1 = dH.cwiseProduct(fwd.H.cwiseProduct(Mat::Ones(fwd.H.rows(), fwd.H.cols()) - fwd.H));
  g.gW1 = dZ1 * X.transpose();
  g.gb1 = dZ1.rowwise().sum();
  return g;
}

double mlp_loss(const MlpModel& m, const Mat& X, const Mat& targets,
                const Mat& weights, LossKind kind) {
  if (X.cols() == 0) throw std::invalid_argument("empty batch");
  const Mat P = mlp_forward(m, X);
  double total = 0.0;
  if (kind == LossKind::kMse) {
    total = weights.cwiseProduct((P - targets).cwiseAbs2()).sum();
  } else {
    const Mat Pc = clamp_mat(P);
    total = -weights
                 .cwiseProduct(targets.cwiseProduct(Pc.array().log().matrix()) +
                               (Mat::Ones(P.rows(), P.cols()) - targets)
                                   .cwiseProduct((1.0 - Pc.array()).log().matrix()))
                 .sum();
  }
  return total / static_cast<double>(X.cols());
}

MlpGrads mlp_loss_grad(const MlpModel& m, const Mat& X, const Mat& targets,
                       const Mat& weights, LossKind kind) {
  if (X.cols() == 0) throw std::invalid_argument("empty batch");
  const MlpForward fwd = mlp_forward_cached(m, X);
  const double B = static_cast<double>(X.cols());
  Mat dLdP;
  if (kind == LossKind::kMse) {
    dLdP = 2.0 * weights.cwiseProduct(fwd.P - targets) / B;
  } else {
    const Mat Pc = clamp_mat(fwd.P);
    dLdP = weights.cwiseProduct(Pc - targets)
               .cwiseQuotient(Pc.cwiseProduct(Mat::Ones(Pc.rows(), Pc.cols()) - Pc)) /
           B;
  }
  return mlp_backward(m, X, fwd, dLdP);
}

AdamState make_adam(const MlpModel& m) {
  AdamState s;
  s.mW1 = Mat::Zero(m.W1.rows(), m.W1.cols());
  s.vW1 = s.mW1;
  s.mW2 = Mat::Zero(m.W2.rows(), m.W2.cols());
  s.vW2 = s.mW2;
  s.mb1 = Vec::Zero(m.b1.size());
  s.vb1 = s.mb1;
  s.mb2 = Vec::Zero(m.b2.size());
  s.vb2 = s.mb2;
  return s;
}

void adam_step(MlpModel& m, const MlpGrads& g, AdamState& s) {
  check_finite(g.gW1, "W1");
  check_finite(g.gW2, "W2");
  check_finite(g.gb1, "b1");
  check_finite(g.gb2, "b2");
  ++s.t;
  adam_update(m.W1, g.gW1, s.mW1, s.vW1, s);
  adam_update(m.W2, g.gW2, s.mW2, s.vW2, s);
  adam_update(m.b1, g.gb1, s.mb1, s.vb1, s);
  adam_update(m.b2, g.gb2, s.mb2, s.vb2, s);
}

}  // namespace cpbm
