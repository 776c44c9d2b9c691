#include "oops/replay_buffer.hpp"

#include "oops/errors.hpp"

#include <random>

namespace oops {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay buffer capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (ring_.size() < capacity_) {
    ring_.push_back(std::move(t));
  } else {
    ring_[head_] = std::move(t);
  }
  head_ = (head_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

void ReplayBuffer::push_episode(const Trajectory& traj, const Eigen::VectorXd& rewards, bool terminal) {
  traj.validate();
  if (!traj.has_actions()) throw InputError("replay buffer: episode has no actions");
  const Eigen::Index n = traj.num_transitions();
  if (rewards.size() != n)
    throw InputError("replay buffer: " + std::to_string(rewards.size()) + " rewards for " +
                     std::to_string(n) + " transitions");
  for (Eigen::Index t = 0; t < n; ++t) {
    push({traj.states.row(t).transpose(), traj.actions->row(t).transpose(),
          traj.states.row(t + 1).transpose(), rewards(t), terminal && t == n - 1, traj.id});
  }
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw InputError("replay buffer index out of range");
  const std::size_t oldest = size_ < capacity_ ? 0 : head_;
  return ring_[(oldest + i) % capacity_];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  if (size_ == 0) throw InputError("replay buffer: sampling from an empty buffer");
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

Batch ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  const std::vector<std::size_t> idx = sample_indices(n, rng);
  const Transition& first = ring_[idx.front()];
  const auto cols = static_cast<Eigen::Index>(n);
  Batch b;
  b.states.resize(first.state.size(), cols);
  b.actions.resize(first.action.size(), cols);
  b.next_states.resize(first.next_state.size(), cols);
  b.rewards.resize(cols);
  b.dones.resize(cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    // Sampling is uniform over stored slots, so ring order does not matter here.
    const Transition& t = ring_[idx[static_cast<std::size_t>(k)]];
    b.states.col(k) = t.state;
    b.actions.col(k) = t.action;
    b.next_states.col(k) = t.next_state;
    b.rewards(k) = t.reward;
    b.dones(k) = t.done ? 1.0 : 0.0;
  }
  return b;
}

void buffer_push_episode(ReplayBuffer& buffer, const Trajectory& traj, const RewardTable& table,
                         Atomization mode, bool terminal) {
  buffer.push_episode(traj, transition_rewards(table, mode), terminal);
}

}  // namespace oops
