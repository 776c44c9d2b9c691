#include "oops/env.hpp"
#include "oops/errors.hpp"
#include "oops/expert.hpp"
#include "oops/gridworld.hpp"
#include "oops/pointmass.hpp"
#include "oops/trajectory.hpp"

#include <doctest.h>

#include <filesystem>

using namespace oops;

TEST_CASE("gridworld reset and moves") {
  GridWorldEnv env;
  for (std::uint64_t seed : {0ULL, 1ULL, 12345ULL}) {
    env.reset(seed);
    CHECK(env.agent() == Cell{0, 0});
  }
  env.reset(0);
  const StepResult r = env.step(Eigen::VectorXd::Constant(1, kRight));
  CHECK(env.agent() == Cell{0, 1});
  CHECK(r.true_reward == -1.0);
  CHECK_FALSE(r.done);
  CHECK(r.state(1) == doctest::Approx(1.0 / 7.0));

  // Off-grid move is a no-op that still costs a step.
  env.reset(0);
  const StepResult up = env.step(Eigen::VectorXd::Constant(1, kUp));
  CHECK(env.agent() == Cell{0, 0});
  CHECK(up.true_reward == -1.0);
}

TEST_CASE("gridworld walls are no-ops") {
  GridWorldConfig cfg;
  cfg.walls = {{0, 1}};
  GridWorldEnv env(cfg);
  env.reset(0);
  const StepResult r = env.step(Eigen::VectorXd::Constant(1, kRight));
  CHECK(env.agent() == Cell{0, 0});
  CHECK(r.true_reward == -1.0);
  cfg.goal = {0, 1};
  CHECK_THROWS_AS(GridWorldEnv{cfg}, ConfigError);
}

TEST_CASE("gridworld state embedding round-trips") {
  GridWorldEnv env;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) CHECK(env.cell_of(env.embed({r, c})) == Cell{r, c});
  CHECK(env.index_of(env.embed({2, 3})) == 19);
}

TEST_CASE("gridworld clean expert takes the shortest path") {
  GridWorldEnv env;
  const Trajectory t = expert_rollout(env, default_expert_spec(env), 0);
  CHECK(t.num_transitions() == 14);
  REQUIRE(t.true_return.has_value());
  CHECK(*t.true_return == -13.0);
  CHECK(env.cell_of(t.states.bottomRows(1).transpose()) == Cell{7, 7});
  CHECK_THROWS_AS(env.step(Eigen::VectorXd::Constant(1, kDown)), EpisodeFinished);
}

TEST_CASE("gridworld expert routes around walls") {
  GridWorldConfig cfg;
  for (int r = 0; r < 7; ++r) cfg.walls.insert({r, 3});
  GridWorldEnv env(cfg);
  const std::vector<int> d = env.distances_to_goal();
  const Trajectory t = expert_rollout(env, default_expert_spec(env), 0);
  CHECK(t.num_transitions() == d[0]);
  CHECK(*t.true_return == -(d[0] - 1.0));
}

TEST_CASE("pointmass dynamics") {
  PointMassEnv env;
  env.set_state(Eigen::Vector4d::Zero());
  const StepResult r = env.step(Eigen::Vector2d(1.0, 0.0));
  CHECK(r.state(2) == doctest::Approx(0.1));
  CHECK(r.state(3) == 0.0);
  CHECK(r.state(0) == doctest::Approx(0.01));
  CHECK(r.state(1) == 0.0);

  // Out-of-bounds actions are clipped.
  env.set_state(Eigen::Vector4d::Zero());
  const StepResult big = env.step(Eigen::Vector2d(50.0, -50.0));
  CHECK(big.state(2) == doctest::Approx(0.1));
  CHECK(big.state(3) == doctest::Approx(-0.1));

  // Velocity and arena clipping.
  env.set_state(Eigen::Vector4d(4.99, 0.0, 2.0, 0.0));
  const StepResult clipped = env.step(Eigen::Vector2d(1.0, 0.0));
  CHECK(clipped.state(2) == 2.0);
  CHECK(clipped.state(0) == 5.0);
}

TEST_CASE("pointmass reset is deterministic and at rest") {
  PointMassEnv env;
  const StateVector a = env.reset(42), b = env.reset(42), c = env.reset(43);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a(2) == 0.0);
  CHECK(a(3) == 0.0);
  CHECK(std::abs(a(0) + 4.0) <= 0.5);
  CHECK(std::abs(a(1) + 4.0) <= 0.5);
}

TEST_CASE("pointmass clean expert reaches the goal") {
  PointMassEnv env;
  // Regression value for seed 0.
  const Trajectory t = expert_rollout(env, default_expert_spec(env), 0);
  const Eigen::Vector2d last = t.states.bottomRows(1).leftCols(2).transpose();
  CHECK(t.num_transitions() == 20);
  for (std::uint64_t seed = 1; seed < 100; ++seed) {
    const Trajectory other = expert_rollout(env, default_expert_spec(env), seed);
    CHECK(other.num_transitions() < env.horizon());
  }
  CHECK((last - env.config().goal).norm() < 0.1);
  CHECK(t.num_states() <= env.horizon() + 1);

  const Trajectory again = expert_rollout(env, default_expert_spec(env), 0);
  CHECK(again.states == t.states);
  CHECK(*again.actions == *t.actions);
}

TEST_CASE("pointmass expert return decreases with noise") {
  PointMassEnv env;
  double previous = 0.0;
  for (double noise : {0.0, 0.5, 1.0, 1.5}) {
    double total = 0.0;
    for (int k = 0; k < 20; ++k) total += *expert_rollout(env, default_expert_spec(env, noise), 1000 + k).true_return;
    const double mean = total / 20.0;
    if (noise > 0.0) CHECK(mean <= previous);
    previous = mean;
  }
}

TEST_CASE("observed view hides the reward") {
  GridWorldEnv env;
  ObservedEnv view(env);
  view.reset(0);
  const Observation o = view.step(Eigen::VectorXd::Constant(1, kDown));
  CHECK(o.state(0) == doctest::Approx(1.0 / 7.0));
  const Trajectory t = rollout(view, [](const StateVector&) { return Eigen::VectorXd::Constant(1, kRight); }, 0);
  CHECK_FALSE(t.true_return.has_value());
  CHECK(t.num_transitions() == 64);
}

TEST_CASE("trajectory jsonl round trip") {
  PointMassEnv env;
  std::vector<Trajectory> trajs;
  for (int k = 0; k < 3; ++k) trajs.push_back(expert_rollout(env, default_expert_spec(env, 0.3), k, k));
  const auto path = std::filesystem::temp_directory_path() / "oops_test_traj.jsonl";
  write_jsonl(path, trajs);
  const std::vector<Trajectory> back = read_jsonl(path);
  REQUIRE(back.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back[k].id == trajs[k].id);
    CHECK(back[k].states == trajs[k].states);
    CHECK(*back[k].actions == *trajs[k].actions);
    CHECK(*back[k].true_return == *trajs[k].true_return);
  }
  CHECK(to_json_line(back[1]) == to_json_line(trajs[1]));
  std::filesystem::remove(path);

  CHECK_THROWS_AS(read_jsonl("/nonexistent/file.jsonl"), DataError);
  CHECK_THROWS_AS(from_json_line("{\"id\": 1}"), DataError);
  CHECK_THROWS_AS(from_json_line("{\"id\": 1, \"states\": [[1],[2,3]]}"), DataError);
  CHECK_THROWS_AS(from_json_line("not json"), DataError);
  const Trajectory minimal = from_json_line("{\"id\": 4, \"states\": [[1.5],[2.0]]}");
  CHECK(minimal.id == 4);
  CHECK_FALSE(minimal.has_actions());
}

TEST_CASE("make_env") {
  CHECK(make_env("pointmass")->id() == "pointmass");
  CHECK(make_env("gridworld")->id() == "gridworld");
  CHECK_THROWS_AS(make_env("hopper"), ConfigError);
}
