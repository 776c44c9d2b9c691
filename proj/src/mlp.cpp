#include "oops/mlp.hpp"

#include "oops/errors.hpp"

#include <cmath>
#include <random>

namespace oops {

MlpParams MlpParams::zeros_like(const MlpParams& p) {
  return {Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols()), Eigen::VectorXd::Zero(p.b1.size()),
          Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols()), Eigen::VectorXd::Zero(p.b2.size())};
}

void MlpParams::for_each(const std::function<void(double&)>& fn) {
  for (Eigen::Index k = 0; k < w1.size(); ++k) fn(w1.data()[k]);
  for (Eigen::Index k = 0; k < b1.size(); ++k) fn(b1.data()[k]);
  for (Eigen::Index k = 0; k < w2.size(); ++k) fn(w2.data()[k]);
  for (Eigen::Index k = 0; k < b2.size(); ++k) fn(b2.data()[k]);
}

Mlp::Mlp(int inputs, int hidden, int outputs, OutputActivation act, Rng& rng) : act_(act) {
  if (inputs < 1 || hidden < 1 || outputs < 1) throw ConfigError("mlp: layer sizes must be positive");
  const auto uniform = [&rng](Eigen::Index rows, Eigen::Index cols, int fan_in) {
    std::uniform_real_distribution<double> u(-1.0 / std::sqrt(fan_in), 1.0 / std::sqrt(fan_in));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
    return m;
  };
  params_.w1 = uniform(hidden, inputs, inputs);
  params_.b1 = uniform(hidden, 1, inputs);
  params_.w2 = uniform(outputs, hidden, hidden);
  params_.b2 = uniform(outputs, 1, hidden);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  MlpCache cache;
  return forward(x, cache);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, MlpCache& cache) const {
  if (x.rows() != params_.w1.cols()) throw DimensionError("mlp: input size mismatch");
  cache.input = x;
  cache.hidden_pre.noalias() = params_.w1 * x;
  cache.hidden_pre.colwise() += params_.b1;
  cache.hidden = cache.hidden_pre.cwiseMax(0.0);
  cache.output.noalias() = params_.w2 * cache.hidden;
  cache.output.colwise() += params_.b2;
  if (act_ == OutputActivation::kTanh) cache.output = cache.output.array().tanh().matrix();
  return cache.output;
}

MlpParams Mlp::backward(const MlpCache& cache, const Eigen::MatrixXd& grad_output,
                        Eigen::MatrixXd* grad_input) const {
  Eigen::MatrixXd g_out = grad_output;
  if (act_ == OutputActivation::kTanh)
    g_out.array() *= 1.0 - cache.output.array().square();

  MlpParams grad;
  grad.w2.noalias() = g_out * cache.hidden.transpose();
  grad.b2 = g_out.rowwise().sum();
  Eigen::MatrixXd g_hidden = params_.w2.transpose() * g_out;
  g_hidden.array() *= (cache.hidden_pre.array() > 0.0).cast<double>();
  grad.w1.noalias() = g_hidden * cache.input.transpose();
  grad.b1 = g_hidden.rowwise().sum();
  if (grad_input) grad_input->noalias() = params_.w1.transpose() * g_hidden;
  return grad;
}

Adam::Adam(const MlpParams& like, AdamConfig cfg)
    : cfg_(cfg), m_(MlpParams::zeros_like(like)), v_(MlpParams::zeros_like(like)) {}

namespace {

template <typename T>
void adam_tensor(T& p, const T& g, T& m, T& v, const AdamConfig& cfg, double bc1, double bc2) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
  p.array() -= cfg.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.epsilon);
}

}  // namespace

void Adam::step(MlpParams& params, const MlpParams& grads) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  adam_tensor(params.w1, grads.w1, m_.w1, v_.w1, cfg_, bc1, bc2);
  adam_tensor(params.b1, grads.b1, m_.b1, v_.b1, cfg_, bc1, bc2);
  adam_tensor(params.w2, grads.w2, m_.w2, v_.w2, cfg_, bc1, bc2);
  adam_tensor(params.b2, grads.b2, m_.b2, v_.b2, cfg_, bc1, bc2);
}

void soft_update(MlpParams& target, const MlpParams& source, double tau) {
  target.w1 = (1.0 - tau) * target.w1 + tau * source.w1;
  target.b1 = (1.0 - tau) * target.b1 + tau * source.b1;
  target.w2 = (1.0 - tau) * target.w2 + tau * source.w2;
  target.b2 = (1.0 - tau) * target.b2 + tau * source.b2;
}

}  // namespace oops
