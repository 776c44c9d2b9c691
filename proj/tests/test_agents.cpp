#include "oracles.hpp"

#include "oops/actor_critic.hpp"
#include "oops/errors.hpp"
#include "oops/mlp.hpp"
#include "oops/replay_buffer.hpp"
#include "oops/tabular_q.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>

using namespace oops;

namespace {

Trajectory episode(int transitions) {
  Trajectory t;
  t.states = Eigen::MatrixXd::Zero(transitions + 1, 2);
  for (int i = 0; i <= transitions; ++i) t.states(i, 0) = i;
  t.actions = Eigen::MatrixXd::Constant(transitions, 1, 0.5);
  return t;
}

double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale < 1e-9 ? std::abs(a - b) : std::abs(a - b) / scale;
}

}  // namespace

TEST_CASE("replay buffer stores episodes with their rewards") {
  ReplayBuffer buffer(10);
  Eigen::VectorXd r(2);
  r << -0.123456789012345, -1e-17;
  buffer.push_episode(episode(2), r, true);
  REQUIRE(buffer.size() == 2);
  CHECK(buffer.at(0).reward == r(0));
  CHECK(buffer.at(1).reward == r(1));
  CHECK_FALSE(buffer.at(0).done);
  CHECK(buffer.at(1).done);
  CHECK(buffer.at(1).next_state(0) == 2.0);

  buffer.push_episode(episode(2), r, false);
  CHECK_FALSE(buffer.at(3).done);
  CHECK_THROWS_AS(buffer.push_episode(episode(3), r, true), InputError);
}

TEST_CASE("replay buffer evicts oldest first") {
  ReplayBuffer one(1);
  Eigen::VectorXd r(2);
  r << 1.0, 2.0;
  one.push_episode(episode(2), r, false);
  REQUIRE(one.size() == 1);
  CHECK(one.at(0).reward == 2.0);

  ReplayBuffer three(3);
  for (int k = 0; k < 5; ++k) three.push({Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), double(k), false, k});
  CHECK(three.at(0).reward == 2.0);
  CHECK(three.at(2).reward == 4.0);
}

TEST_CASE("replay buffer sampling is uniform and batches are column-major") {
  ReplayBuffer buffer(100);
  for (int k = 0; k < 4; ++k)
    buffer.push({Eigen::VectorXd::Constant(2, k), Eigen::VectorXd::Constant(1, k), Eigen::VectorXd::Constant(2, k + 1), double(k), k == 3, 0});
  Rng rng(1);
  std::vector<int> counts(4, 0);
  for (std::size_t i : buffer.sample_indices(40000, rng)) ++counts[i];
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  const Batch b = buffer.sample(8, rng);
  CHECK(b.states.rows() == 2);
  CHECK(b.states.cols() == 8);
  for (Eigen::Index k = 0; k < 8; ++k) {
    CHECK(b.rewards(k) == b.states(0, k));
    CHECK(b.dones(k) == (b.rewards(k) == 3.0 ? 1.0 : 0.0));
  }
}

TEST_CASE("tabular q update rule") {
  TabularQConfig cfg;
  cfg.alpha = 0.5;
  cfg.gamma = 0.9;
  TabularQ q(3, 2);
  q.update({{0, 1, 2, 1.0, false}}, cfg);
  CHECK(q.table()(0, 1) == 0.5);

  TabularQ terminal(3, 2);
  terminal.table()(2, 0) = 10.0;
  terminal.update({{0, 0, 2, 2.0, true}}, cfg);
  CHECK(terminal.table()(0, 0) == 1.0);

  // At the Bellman fixed point the update changes nothing.
  TabularQ fixed(2, 2);
  fixed.table() << 0.0, 0.0, 0.0, 0.0;
  fixed.table()(1, 0) = 1.0;
  fixed.table()(0, 0) = 0.5 + 0.9 * 1.0;
  const Eigen::MatrixXd before = fixed.table();
  fixed.update({{0, 0, 1, 0.5, false}}, cfg);
  CHECK(fixed.table() == before);

  CHECK_THROWS_AS(q.update({{5, 0, 0, 0.0, false}}, cfg), InputError);
}

TEST_CASE("tabular q acting") {
  TabularQ q(2, 4);
  Rng rng(3);
  CHECK(q.act(0, false, 1.0, rng) == 0);
  q.table()(1, 2) = 1.0;
  q.table()(1, 3) = 1.0;
  CHECK(q.greedy(1) == 2);
  CHECK(q.act(1, false, 1.0, rng) == q.act(1, false, 1.0, rng));
  int explored = 0;
  for (int k = 0; k < 1000; ++k) explored += q.act(1, true, 1.0, rng) != 2;
  CHECK(explored > 600);
  TabularQConfig cfg;
  CHECK(cfg.epsilon_at(0, 100) == 1.0);
  CHECK(cfg.epsilon_at(50, 100) == doctest::Approx(0.05));
  CHECK(cfg.epsilon_at(90, 100) == doctest::Approx(0.05));
  CHECK(cfg.epsilon_at(25, 100) == doctest::Approx(0.525));
}

TEST_CASE("actor and critic gradients match central finite differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const int sdim = 2 + static_cast<int>(seed % 3), adim = 1 + static_cast<int>(seed % 2);
    const int hidden = 3 + static_cast<int>(seed);
    Mlp actor(sdim, hidden, adim, OutputActivation::kTanh, rng);
    Mlp critic(sdim + adim, hidden + 1, 1, OutputActivation::kLinear, rng);
    const Eigen::MatrixXd states = oops::testing::random_matrix(sdim, 6, rng, -1.0, 1.0);
    const Eigen::MatrixXd actions = oops::testing::random_matrix(adim, 6, rng, -1.0, 1.0);
    const Eigen::VectorXd targets = oops::testing::random_matrix(6, 1, rng, -1.0, 1.0);
    const double h = 1e-5;

    const LossGrad c = critic_loss_grad(critic, states, actions, targets);
    MlpParams analytic = c.grad;
    std::vector<double> flat_c;
    analytic.for_each([&](double& g) { flat_c.push_back(g); });
    std::size_t k = 0;
    critic.params().for_each([&](double& p) {
      const double saved = p;
      p = saved + h;
      const double up = critic_loss_grad(critic, states, actions, targets).loss;
      p = saved - h;
      const double down = critic_loss_grad(critic, states, actions, targets).loss;
      p = saved;
      CHECK(relative_error(flat_c[k++], (up - down) / (2 * h)) <= 1e-4);
    });

    const LossGrad a = actor_loss_grad(actor, critic, states);
    MlpParams analytic_a = a.grad;
    std::vector<double> flat_a;
    analytic_a.for_each([&](double& g) { flat_a.push_back(g); });
    k = 0;
    actor.params().for_each([&](double& p) {
      const double saved = p;
      p = saved + h;
      const double up = actor_loss_grad(actor, critic, states).loss;
      p = saved - h;
      const double down = actor_loss_grad(actor, critic, states).loss;
      p = saved;
      CHECK(relative_error(flat_a[k++], (up - down) / (2 * h)) <= 1e-4);
    });
  }
}

TEST_CASE("zero critic with zero rewards does not drift") {
  Rng rng(2);
  ActorCriticConfig cfg;
  cfg.actor_hidden = 8;
  cfg.critic_hidden = 8;
  ActorCritic agent(3, 2, cfg, rng);
  for (auto* net : {&agent.critic(), &agent.critic_target()}) {
    MlpParams& p = net->params();
    p = MlpParams::zeros_like(p);
  }
  const MlpParams actor_before = agent.actor().params();
  Batch batch;
  batch.states = oops::testing::random_matrix(3, 16, rng);
  batch.actions = oops::testing::random_matrix(2, 16, rng);
  batch.next_states = oops::testing::random_matrix(3, 16, rng);
  batch.rewards = Eigen::VectorXd::Zero(16);
  batch.dones = Eigen::VectorXd::Zero(16);
  const UpdateDiagnostics d = agent.update(batch);
  CHECK(d.critic_loss == 0.0);
  CHECK(agent.critic().params().w1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(agent.critic().params().b2.cwiseAbs().maxCoeff() == 0.0);
  CHECK((agent.actor().params().w1 - actor_before.w1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("soft update is the exact convex combination") {
  Rng rng(8);
  ActorCriticConfig cfg;
  cfg.actor_hidden = 5;
  cfg.critic_hidden = 5;
  ActorCritic agent(2, 1, cfg, rng);
  // Perturb the online nets so targets and online differ before the update.
  agent.critic().params().w1.array() += 0.1;
  const MlpParams old_target = agent.critic_target().params();
  Batch batch;
  batch.states = oops::testing::random_matrix(2, 4, rng);
  batch.actions = oops::testing::random_matrix(1, 4, rng);
  batch.next_states = oops::testing::random_matrix(2, 4, rng);
  batch.rewards = Eigen::VectorXd::Ones(4);
  batch.dones = Eigen::VectorXd::Zero(4);
  agent.update(batch);
  const MlpParams& online = agent.critic().params();
  const Eigen::MatrixXd expected = (1.0 - cfg.tau) * old_target.w1 + cfg.tau * online.w1;
  CHECK(agent.critic_target().params().w1 == expected);
}

TEST_CASE("actor-critic acting") {
  Rng rng(4);
  ActorCriticConfig cfg;
  cfg.exploration_noise = 5.0;
  ActorCritic agent(4, 2, cfg, rng);
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(4, 0.3);
  CHECK(agent.act(s, false, rng) == agent.act(s, false, rng));
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd a = agent.act(s, true, rng);
    CHECK(a.maxCoeff() <= 1.0);
    CHECK(a.minCoeff() >= -1.0);
  }
}

TEST_CASE("non-finite loss aborts the update") {
  Rng rng(5);
  ActorCritic agent(2, 1, ActorCriticConfig{}, rng);
  Batch batch;
  batch.states = Eigen::MatrixXd::Zero(2, 2);
  batch.actions = Eigen::MatrixXd::Zero(1, 2);
  batch.next_states = Eigen::MatrixXd::Zero(2, 2);
  batch.rewards = Eigen::VectorXd::Constant(2, std::numeric_limits<double>::quiet_NaN());
  batch.dones = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(agent.update(batch), DivergenceError);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  Rng rng(6);
  ActorCriticConfig cfg;
  cfg.actor_hidden = 7;
  cfg.critic_hidden = 9;
  ActorCritic agent(4, 2, cfg, rng);
  agent.actor().params().b2(0) = 1.0 / 3.0;
  const auto dir = std::filesystem::temp_directory_path() / "oops_ckpt_test";
  save_checkpoint(dir / "ac.ckpt", agent);
  CHECK(checkpoint_kind(dir / "ac.ckpt") == "actor-critic");
  ActorCritic loaded = load_actor_critic(dir / "ac.ckpt");
  CHECK(loaded.actor().params().w1 == agent.actor().params().w1);
  CHECK(loaded.actor().params().b2 == agent.actor().params().b2);
  CHECK(loaded.critic().params().w2 == agent.critic().params().w2);
  CHECK(loaded.critic_target().params().b1 == agent.critic_target().params().b1);

  TabularQ q(5, 4);
  q.table()(3, 2) = -0.1;
  save_checkpoint(dir / "q.ckpt", q);
  TabularQ q2(5, 4);
  load_checkpoint(dir / "q.ckpt", q2);
  CHECK(q2.table() == q.table());
  TabularQ wrong(4, 4);
  CHECK_THROWS_AS(load_checkpoint(dir / "q.ckpt", wrong), DataError);
  CHECK_THROWS_AS(load_checkpoint(dir / "q.ckpt", agent), DataError);
  CHECK_THROWS_AS(checkpoint_kind(dir / "missing.ckpt"), DataError);
  std::filesystem::remove_all(dir);
}
