#pragma once

#include "oops/mlp.hpp"
#include "oops/replay_buffer.hpp"
#include "oops/rng.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>

namespace oops {

// Deterministic actor-critic (DDPG-style, single critic). Defaults follow the
// TD3 table except for the hidden widths, which are shrunk for desk-scale
// problems (paper-scale: actor 256, critic 1024).
struct ActorCriticConfig {
  int actor_hidden = 64;
  int critic_hidden = 64;
  double tau = 3e-3;
  double exploration_noise = 0.2;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int batch_size = 256;
  double gamma = 0.99;
  // Uniform-random actions before the first update.
  long warmup_steps = 1000;
  int updates_per_step = 1;

  void validate() const;
};

struct UpdateDiagnostics {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double mean_q = 0.0;
};

struct LossGrad {
  double loss = 0.0;
  MlpParams grad;
};

// Critic loss mean((Q(s,a) - y)^2) and its parameter gradient.
LossGrad critic_loss_grad(const Mlp& critic, const Eigen::MatrixXd& states,
                          const Eigen::MatrixXd& actions, const Eigen::VectorXd& targets);

// Actor loss -mean Q(s, mu(s)) and its gradient w.r.t. the actor parameters.
LossGrad actor_loss_grad(const Mlp& actor, const Mlp& critic, const Eigen::MatrixXd& states);

class ActorCritic {
 public:
  ActorCritic(int state_dim, int action_dim, const ActorCriticConfig& cfg, Rng& rng);

  // One DDPG step: critic regression toward r + gamma (1 - done) Q'(s', mu'(s')),
  // actor ascent on Q(s, mu(s)), then soft target updates. Throws
  // DivergenceError on a non-finite loss.
  UpdateDiagnostics update(const Batch& batch);

  // mu(s), plus clipped Gaussian exploration noise when `explore`.
  Eigen::VectorXd act(const Eigen::VectorXd& state, bool explore, Rng& rng) const;

  Mlp& actor() { return actor_; }
  Mlp& critic() { return critic_; }
  Mlp& actor_target() { return actor_target_; }
  Mlp& critic_target() { return critic_target_; }
  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  const Mlp& actor_target() const { return actor_target_; }
  const Mlp& critic_target() const { return critic_target_; }
  const ActorCriticConfig& config() const { return cfg_; }

 private:
  ActorCriticConfig cfg_;
  Mlp actor_, critic_, actor_target_, critic_target_;
  Adam actor_opt_, critic_opt_;
};

class TabularQ;

// Versioned text checkpoints. Values are written as hexadecimal floats so a
// load reproduces every parameter bit-for-bit.
void save_checkpoint(const std::filesystem::path& path, const ActorCritic& agent);
void load_checkpoint(const std::filesystem::path& path, ActorCritic& agent);
void save_checkpoint(const std::filesystem::path& path, const TabularQ& agent);
void load_checkpoint(const std::filesystem::path& path, TabularQ& agent);

// "actor-critic" or "tabular-q", read from the checkpoint header.
std::string checkpoint_kind(const std::filesystem::path& path);

// Rebuilds an agent with the network shapes stored in the checkpoint.
ActorCritic load_actor_critic(const std::filesystem::path& path, const ActorCriticConfig& cfg = {});

}  // namespace oops
