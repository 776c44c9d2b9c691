#include "oracles.hpp"

#include "oops/distance.hpp"
#include "oops/reward.hpp"

#include <doctest.h>

#include <random>

using namespace oops;

namespace {

Trajectory line(std::initializer_list<double> xs, std::int64_t id = 0) {
  Trajectory t;
  t.id = id;
  t.states.resize(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) t.states(i++, 0) = x;
  return t;
}

RewardConfig exact_euclid() {
  RewardConfig cfg;
  cfg.metric = {BaseDistance::kEuclidean, 1};
  cfg.solver.kind = SolverKind::kExact;
  return cfg;
}

Trajectory random_traj(std::mt19937_64& rng, Eigen::Index states, Eigen::Index dim, std::int64_t id = 0) {
  Trajectory t;
  t.id = id;
  t.states = oops::testing::random_matrix(states, dim, rng, -1.0, 1.0);
  return t;
}

}  // namespace

TEST_CASE("rewards for a learner identical to the expert are zero") {
  const Trajectory e = line({0, 1, 2, 4});
  const RewardTable table = episode_rewards(e, {{e}, "test", ""}, exact_euclid());
  REQUIRE(table.rewards.size() == 3);
  CHECK(table.rewards.cwiseAbs().maxCoeff() == 0.0);
  CHECK(table.distance_value == 0.0);
}

TEST_CASE("rewards follow the coupling row costs") {
  // Atoms {[0,1],[1,2]} vs {[0,1],[1,3]}: identity matching, row costs 0 and 1
  // each carrying mass 1/2.
  const RewardTable table = episode_rewards(line({0, 1, 2}), {{line({0, 1, 3})}, "", ""}, exact_euclid());
  REQUIRE(table.rewards.size() == 2);
  CHECK(table.rewards(0) == 0.0);
  CHECK(table.rewards(1) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(table.distance_value == doctest::Approx(0.5).epsilon(1e-15));
  const double direct = trajectory_distance(line({0, 1, 2}), line({0, 1, 3}), Atomization::kStateTransition,
                                            {BaseDistance::kEuclidean, 1}, {SolverKind::kExact, {}})
                            .value;
  CHECK(table.distance_value == doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("reward-sum identity, nonpositivity and scale equivariance") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    ExpertDataset experts;
    for (int k = 0; k < 3; ++k) experts.trajectories.push_back(random_traj(rng, 8 + k, 3, k));
    const Trajectory learner = random_traj(rng, 5 + trial % 6, 3);
    for (ExpertSelection sel : {ExpertSelection::kClosest, ExpertSelection::kAverage}) {
      for (SolverKind solver : {SolverKind::kSinkhorn, SolverKind::kGreedy, SolverKind::kExact}) {
        RewardConfig cfg;
        cfg.selection = sel;
        cfg.solver.kind = solver;
        const RewardTable t1 = episode_rewards(learner, experts, cfg);
        CHECK(std::abs(t1.rewards.sum() + t1.distance_value) <= 1e-9);
        CHECK(t1.rewards.maxCoeff() <= 0.0);
        cfg.reward_scale = 2.5;
        const RewardTable t2 = episode_rewards(learner, experts, cfg);
        CHECK(std::abs(t2.rewards.sum() + 2.5 * t2.distance_value) <= 1e-9);
        CHECK((t2.rewards - 2.5 * t1.rewards).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(t2.matched_expert_index == t1.matched_expert_index);
      }
    }
  }
}

TEST_CASE("closest and average agree for a single expert") {
  std::mt19937_64 rng(4);
  const ExpertDataset experts{{random_traj(rng, 9, 2)}, "", ""};
  const Trajectory learner = random_traj(rng, 7, 2);
  RewardConfig closest, average;
  average.selection = ExpertSelection::kAverage;
  const RewardTable a = episode_rewards(learner, experts, closest);
  const RewardTable b = episode_rewards(learner, experts, average);
  CHECK(a.rewards == b.rewards);
  CHECK(a.distance_value == b.distance_value);
}

TEST_CASE("expert selection") {
  const Trajectory learner = line({0, 1, 2});
  const ExpertDataset experts{{line({5, 6, 9}, 10), line({0, 1, 2.5}, 11), line({0, 1, 2.5}, 12)}, "", ""};
  const RewardConfig cfg = exact_euclid();
  const ExpertMatch m = select_expert(learner, experts, cfg);
  CHECK(m.index == 1);  // exact tie between 1 and 2 goes to the lower index
  CHECK(m.distance == doctest::Approx(0.25));
  CHECK(episode_rewards(learner, experts, cfg).matched_expert_id == 11);
  CHECK(select_expert(learner, {{line({3, 3, 3})}, "", ""}, cfg).index == 0);
}

TEST_CASE("reward generation validates inputs") {
  RewardConfig cfg;
  CHECK_THROWS_AS(episode_rewards(line({0, 1}), ExpertDataset{}, cfg), InputError);
  Trajectory two_d;
  two_d.states = Eigen::MatrixXd::Zero(3, 2);
  CHECK_THROWS_AS(episode_rewards(line({0, 1, 2}), {{two_d}, "", ""}, cfg), DimensionError);
  cfg.reward_scale = 0.0;
  CHECK_THROWS_AS(episode_rewards(line({0, 1, 2}), {{line({0, 1})}, "", ""}, cfg), ConfigError);
}

TEST_CASE("state atomization rewards map onto transitions") {
  RewardConfig cfg = exact_euclid();
  cfg.mode = Atomization::kState;
  const RewardTable table = episode_rewards(line({0, 1, 2}), {{line({0, 1, 5})}, "", ""}, cfg);
  REQUIRE(table.rewards.size() == 3);
  const Eigen::VectorXd per_step = transition_rewards(table, cfg.mode);
  REQUIRE(per_step.size() == 2);
  CHECK(per_step.sum() == doctest::Approx(table.rewards.sum()).epsilon(1e-15));
  CHECK(per_step(1) == table.rewards(2));
}

TEST_CASE("stale coupling bound") {
  RewardConfig cfg;
  cfg.solver.kind = SolverKind::kExact;
  const Trajectory e = line({0, 0.5, 1.5, 2});
  const Trajectory same = e;
  const RewardTable own = episode_rewards(same, {{e}, "", ""}, cfg);
  const StaleBound exact_self = stale_bound_check(same, e, own.coupling, cfg);
  CHECK(exact_self.optimal == 0.0);
  CHECK(exact_self.stale == 0.0);
  CHECK(exact_self.holds);

  std::mt19937_64 rng(99);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int trial = 0; trial < 100; ++trial) {
    const Trajectory expert = random_traj(rng, 10, 2);
    Trajectory old = random_traj(rng, 10, 2);
    cfg.solver.kind = trial % 2 ? SolverKind::kSinkhorn : SolverKind::kGreedy;
    const RewardTable stale = episode_rewards(old, {{expert}, "", ""}, cfg);
    Trajectory fresh = old;
    for (Eigen::Index k = 0; k < fresh.states.size(); ++k) fresh.states.data()[k] += noise(rng);
    const StaleBound b = stale_bound_check(fresh, expert, stale.coupling, cfg);
    CHECK(b.holds);
    CHECK(b.optimal <= b.stale + 1e-9);
  }
  CHECK_THROWS_AS(stale_bound_check(line({0, 1}), e, own.coupling, cfg), DimensionError);
}
