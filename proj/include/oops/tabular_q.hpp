#pragma once

#include "oops/rng.hpp"

#include <Eigen/Dense>

#include <vector>

namespace oops {

struct TabularQConfig {
  double alpha = 0.1;
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  // Fraction of the step budget over which epsilon decays linearly.
  double epsilon_decay_fraction = 0.5;
  int updates_per_step = 4;
  int batch_size = 32;

  void validate() const;
  double epsilon_at(long step, long total_steps) const;
};

struct IndexedTransition {
  int state = 0;
  int action = 0;
  int next_state = 0;
  double reward = 0.0;
  bool done = false;
};

class TabularQ {
 public:
  TabularQ(int num_states, int num_actions);

  // Q(s,a) += alpha * (r + gamma * (1 - done) * max_a' Q(s',a') - Q(s,a)),
  // applied sequentially over the batch.
  void update(const std::vector<IndexedTransition>& batch, const TabularQConfig& cfg);

  // Argmax with ties to the lowest action index.
  int greedy(int state) const;
  // Epsilon-greedy when `explore`, greedy otherwise.
  int act(int state, bool explore, double epsilon, Rng& rng) const;

  const Eigen::MatrixXd& table() const { return q_; }
  Eigen::MatrixXd& table() { return q_; }
  int num_states() const { return static_cast<int>(q_.rows()); }
  int num_actions() const { return static_cast<int>(q_.cols()); }

 private:
  void check(int state, int action) const;
  Eigen::MatrixXd q_;
};

}  // namespace oops
