#pragma once

#include "oops/rng.hpp"

#include <Eigen/Dense>

#include <functional>

namespace oops {

enum class OutputActivation { kLinear, kTanh };

// Parameters of a one-hidden-layer network y = out(W2 relu(W1 x + b1) + b2).
// The same struct holds gradients and Adam moments.
struct MlpParams {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;

  static MlpParams zeros_like(const MlpParams& p);
  Eigen::Index count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
  // Visits every scalar parameter in a fixed order (w1, b1, w2, b2, column-major).
  void for_each(const std::function<void(double&)>& fn);
};

// Forward activations kept for backpropagation.
struct MlpCache {
  Eigen::MatrixXd input;   // in x B
  Eigen::MatrixXd hidden_pre;  // h x B
  Eigen::MatrixXd hidden;  // h x B
  Eigen::MatrixXd output;  // out x B
};

class Mlp {
 public:
  Mlp() = default;
  // Weights uniform in +-1/sqrt(fan_in), biases likewise.
  Mlp(int inputs, int hidden, int outputs, OutputActivation act, Rng& rng);

  // Columns of x are samples.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, MlpCache& cache) const;

  // Given dL/dy for the cached forward pass, returns dL/dparams and writes
  // dL/dx into `grad_input` when non-null.
  MlpParams backward(const MlpCache& cache, const Eigen::MatrixXd& grad_output,
                     Eigen::MatrixXd* grad_input = nullptr) const;

  MlpParams& params() { return params_; }
  const MlpParams& params() const { return params_; }
  OutputActivation activation() const { return act_; }
  int inputs() const { return static_cast<int>(params_.w1.cols()); }
  int hidden() const { return static_cast<int>(params_.w1.rows()); }
  int outputs() const { return static_cast<int>(params_.w2.rows()); }

 private:
  MlpParams params_;
  OutputActivation act_ = OutputActivation::kLinear;
};

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(const MlpParams& like, AdamConfig cfg);

  void step(MlpParams& params, const MlpParams& grads);
  long steps() const { return t_; }

 private:
  AdamConfig cfg_;
  MlpParams m_, v_;
  long t_ = 0;
};

// target <- (1 - tau) * target + tau * source, elementwise.
void soft_update(MlpParams& target, const MlpParams& source, double tau);

}  // namespace oops
