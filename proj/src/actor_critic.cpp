#include "oops/actor_critic.hpp"

#include "oops/errors.hpp"
#include "oops/tabular_q.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace oops {

void ActorCriticConfig::validate() const {
  if (actor_hidden < 1 || critic_hidden < 1 || batch_size < 1)
    throw ConfigError("actor-critic: sizes must be positive");
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("actor-critic: tau must be in (0, 1)");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw ConfigError("actor-critic: learning rates must be positive");
  if (exploration_noise < 0.0) throw ConfigError("actor-critic: exploration_noise must be >= 0");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("actor-critic: gamma must be in [0, 1)");
  if (warmup_steps < 0 || updates_per_step < 0) throw ConfigError("actor-critic: bad update schedule");
}

namespace {

Eigen::MatrixXd stack(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom) {
  Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

}  // namespace

LossGrad critic_loss_grad(const Mlp& critic, const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions,
                          const Eigen::VectorXd& targets) {
  MlpCache cache;
  const Eigen::MatrixXd q = critic.forward(stack(states, actions), cache);
  const Eigen::RowVectorXd err = q.row(0) - targets.transpose();
  const double n = static_cast<double>(targets.size());
  LossGrad out;
  out.loss = err.squaredNorm() / n;
  out.grad = critic.backward(cache, (2.0 / n) * err);
  return out;
}

LossGrad actor_loss_grad(const Mlp& actor, const Mlp& critic, const Eigen::MatrixXd& states) {
  MlpCache actor_cache, critic_cache;
  const Eigen::MatrixXd actions = actor.forward(states, actor_cache);
  const Eigen::MatrixXd q = critic.forward(stack(states, actions), critic_cache);
  const double n = static_cast<double>(states.cols());
  LossGrad out;
  out.loss = -q.sum() / n;
  Eigen::MatrixXd grad_input;
  critic.backward(critic_cache, Eigen::MatrixXd::Constant(1, states.cols(), -1.0 / n), &grad_input);
  out.grad = actor.backward(actor_cache, grad_input.bottomRows(actions.rows()));
  return out;
}

ActorCritic::ActorCritic(int state_dim, int action_dim, const ActorCriticConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  actor_ = Mlp(state_dim, cfg_.actor_hidden, action_dim, OutputActivation::kTanh, rng);
  critic_ = Mlp(state_dim + action_dim, cfg_.critic_hidden, 1, OutputActivation::kLinear, rng);
  actor_target_ = actor_;
  critic_target_ = critic_;
  actor_opt_ = Adam(actor_.params(), {cfg_.actor_lr, cfg_.adam_beta1, cfg_.adam_beta2, cfg_.adam_epsilon});
  critic_opt_ = Adam(critic_.params(), {cfg_.critic_lr, cfg_.adam_beta1, cfg_.adam_beta2, cfg_.adam_epsilon});
}

UpdateDiagnostics ActorCritic::update(const Batch& batch) {
  const Eigen::MatrixXd next_actions = actor_target_.forward(batch.next_states);
  const Eigen::VectorXd next_q = critic_target_.forward(stack(batch.next_states, next_actions)).row(0).transpose();
  const Eigen::VectorXd targets =
      batch.rewards.array() + cfg_.gamma * (1.0 - batch.dones.array()) * next_q.array();

  UpdateDiagnostics diag;
  const LossGrad critic_step = critic_loss_grad(critic_, batch.states, batch.actions, targets);
  diag.critic_loss = critic_step.loss;
  if (!std::isfinite(diag.critic_loss))
    throw DivergenceError("actor-critic: non-finite critic loss");
  critic_opt_.step(critic_.params(), critic_step.grad);

  const LossGrad actor_step = actor_loss_grad(actor_, critic_, batch.states);
  diag.actor_loss = actor_step.loss;
  diag.mean_q = -actor_step.loss;
  if (!std::isfinite(diag.actor_loss))
    throw DivergenceError("actor-critic: non-finite actor loss");
  actor_opt_.step(actor_.params(), actor_step.grad);

  soft_update(critic_target_.params(), critic_.params(), cfg_.tau);
  soft_update(actor_target_.params(), actor_.params(), cfg_.tau);
  return diag;
}

Eigen::VectorXd ActorCritic::act(const Eigen::VectorXd& state, bool explore, Rng& rng) const {
  Eigen::VectorXd a = actor_.forward(state).col(0);
  if (explore && cfg_.exploration_noise > 0.0) {
    std::normal_distribution<double> noise(0.0, cfg_.exploration_noise);
    for (Eigen::Index k = 0; k < a.size(); ++k) a(k) += noise(rng);
  }
  return a.cwiseMax(-1.0).cwiseMin(1.0);
}

// ---------------------------------------------------------------------------
// Checkpoints
//
//   oops-checkpoint 1
//   kind <actor-critic|tabular-q>
//   tensor <name> <rows> <cols>
//   <rows lines of cols hexadecimal floats>
//   ...
//   end

namespace {

constexpr const char* kMagic = "oops-checkpoint";
constexpr int kVersion = 1;

using TensorMap = std::map<std::string, Eigen::MatrixXd>;

void write_tensor(std::ostream& out, const std::string& name, const Eigen::MatrixXd& m) {
  out << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%a", m(i, j));
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  }
}

void write_checkpoint(const std::filesystem::path& path, const std::string& kind, const TensorMap& tensors) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << kMagic << ' ' << kVersion << '\n' << "kind " << kind << '\n';
  for (const auto& [name, m] : tensors) write_tensor(out, name, m);
  out << "end\n";
  if (!out) throw DataError("write failed: " + path.string());
}

std::pair<std::string, TensorMap> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::string magic, word, kind;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) throw DataError(path.string() + ": not a checkpoint");
  if (version != kVersion)
    throw DataError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  if (!(in >> word >> kind) || word != "kind") throw DataError(path.string() + ": missing kind line");
  TensorMap tensors;
  while (in >> word && word != "end") {
    if (word != "tensor") throw DataError(path.string() + ": unexpected token `" + word + "`");
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0) throw DataError(path.string() + ": bad tensor header");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        std::string tok;
        if (!(in >> tok)) throw DataError(path.string() + ": truncated tensor " + name);
        char* end = nullptr;
        m(i, j) = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0') throw DataError(path.string() + ": bad value in " + name);
      }
    }
    tensors.emplace(name, std::move(m));
  }
  if (word != "end") throw DataError(path.string() + ": missing end marker");
  return {kind, std::move(tensors)};
}

void put(TensorMap& map, const std::string& prefix, const MlpParams& p) {
  map[prefix + ".w1"] = p.w1;
  map[prefix + ".b1"] = p.b1;
  map[prefix + ".w2"] = p.w2;
  map[prefix + ".b2"] = p.b2;
}

MlpParams take(const TensorMap& map, const std::string& prefix, const std::string& file) {
  const auto get = [&](const std::string& key) -> const Eigen::MatrixXd& {
    auto it = map.find(prefix + key);
    if (it == map.end()) throw DataError(file + ": missing tensor " + prefix + key);
    return it->second;
  };
  MlpParams p{get(".w1"), get(".b1"), get(".w2"), get(".b2")};
  if (p.b1.size() != p.w1.rows() || p.w2.cols() != p.w1.rows() || p.b2.size() != p.w2.rows())
    throw DataError(file + ": inconsistent shapes for " + prefix);
  return p;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ActorCritic& agent) {
  TensorMap map;
  put(map, "actor", agent.actor().params());
  put(map, "critic", agent.critic().params());
  put(map, "actor_target", agent.actor_target().params());
  put(map, "critic_target", agent.critic_target().params());
  write_checkpoint(path, "actor-critic", map);
}

void load_checkpoint(const std::filesystem::path& path, ActorCritic& agent) {
  auto [kind, map] = read_checkpoint(path);
  if (kind != "actor-critic") throw DataError(path.string() + ": expected an actor-critic checkpoint");
  const std::string file = path.string();
  agent.actor().params() = take(map, "actor", file);
  agent.critic().params() = take(map, "critic", file);
  agent.actor_target().params() = take(map, "actor_target", file);
  agent.critic_target().params() = take(map, "critic_target", file);
}

void save_checkpoint(const std::filesystem::path& path, const TabularQ& agent) {
  write_checkpoint(path, "tabular-q", {{"q", agent.table()}});
}

void load_checkpoint(const std::filesystem::path& path, TabularQ& agent) {
  auto [kind, map] = read_checkpoint(path);
  if (kind != "tabular-q") throw DataError(path.string() + ": expected a tabular-q checkpoint");
  auto it = map.find("q");
  if (it == map.end()) throw DataError(path.string() + ": missing tensor q");
  if (it->second.rows() != agent.table().rows() || it->second.cols() != agent.table().cols())
    throw DataError(path.string() + ": q table shape does not match");
  agent.table() = it->second;
}

std::string checkpoint_kind(const std::filesystem::path& path) { return read_checkpoint(path).first; }

ActorCritic load_actor_critic(const std::filesystem::path& path, const ActorCriticConfig& cfg) {
  auto [kind, map] = read_checkpoint(path);
  if (kind != "actor-critic") throw DataError(path.string() + ": expected an actor-critic checkpoint");
  const MlpParams actor = take(map, "actor", path.string());
  const MlpParams critic = take(map, "critic", path.string());
  ActorCriticConfig shaped = cfg;
  shaped.actor_hidden = static_cast<int>(actor.w1.rows());
  shaped.critic_hidden = static_cast<int>(critic.w1.rows());
  Rng rng(0);
  ActorCritic agent(static_cast<int>(actor.w1.cols()), static_cast<int>(actor.w2.rows()), shaped, rng);
  load_checkpoint(path, agent);
  return agent;
}

}  // namespace oops
