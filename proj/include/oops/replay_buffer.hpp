#pragma once

#include "oops/measure.hpp"
#include "oops/reward.hpp"
#include "oops/rng.hpp"
#include "oops/trajectory.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace oops {

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  Eigen::VectorXd next_state;
  double reward = 0.0;
  bool done = false;
  std::int64_t episode_id = 0;
};

// Minibatch laid out column-wise (one column per sampled transition).
struct Batch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  Eigen::MatrixXd next_states;
  Eigen::VectorXd rewards;
  Eigen::VectorXd dones;

  Eigen::Index size() const { return rewards.size(); }
};

// Fixed-capacity FIFO ring of transitions. Rewards are written once, when an
// episode is pushed, and never rewritten.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 1'000'000);

  void push(Transition t);

  // Stores every transition of `traj` with rewards[t]; the done flag is set
  // on the final transition only when `terminal` is true.
  void push_episode(const Trajectory& traj, const Eigen::VectorXd& rewards, bool terminal);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return size_ == 0; }

  // i-th oldest stored transition.
  const Transition& at(std::size_t i) const;

  // Uniform sampling with replacement.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;
  Batch sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> ring_;
  std::size_t head_ = 0;  // next write slot
  std::size_t size_ = 0;
};

// Pushes one episode with the proxy rewards of `table`, mapped onto
// transitions for the table's atomization.
void buffer_push_episode(ReplayBuffer& buffer, const Trajectory& traj, const RewardTable& table,
                         Atomization mode, bool terminal);

}  // namespace oops
