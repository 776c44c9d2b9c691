#pragma once

#include "oops/trajectory.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace oops {

struct ActionSpace {
  bool discrete = false;
  // Continuous: vector length. Discrete: number of actions (the action
  // vector then holds a single index).
  int size = 0;
  double low = -1.0;
  double high = 1.0;
};

struct StepResult {
  StateVector state;
  double true_reward = 0.0;
  // Episode over (goal reached or horizon hit).
  bool done = false;
  // Episode ended in an absorbing state; horizon truncation is not terminal.
  bool terminal = false;
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string id() const = 0;
  virtual StateVector reset(std::uint64_t seed) = 0;
  // Throws EpisodeFinished when called after the episode ended.
  virtual StepResult step(const Eigen::VectorXd& action) = 0;
  virtual int state_dim() const = 0;
  virtual ActionSpace action_space() const = 0;
  virtual int horizon() const = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

// What a learner sees from a step: no reward.
struct Observation {
  StateVector state;
  bool done = false;
  bool terminal = false;
};

// Learner-facing view of an environment. The true task reward never leaves
// this wrapper; only evaluation code holds the underlying Environment.
class ObservedEnv {
 public:
  explicit ObservedEnv(Environment& env) : env_(env) {}

  StateVector reset(std::uint64_t seed) { return env_.reset(seed); }
  Observation step(const Eigen::VectorXd& action) {
    StepResult r = env_.step(action);
    return {std::move(r.state), r.done, r.terminal};
  }
  int state_dim() const { return env_.state_dim(); }
  ActionSpace action_space() const { return env_.action_space(); }
  int horizon() const { return env_.horizon(); }

 private:
  Environment& env_;
};

using Policy = std::function<Eigen::VectorXd(const StateVector&)>;

// Runs one episode with `policy` from reset(seed), recording states, actions
// and the true return.
Trajectory rollout(Environment& env, const Policy& policy, std::uint64_t seed, std::int64_t id = 0);

// Same, through the observed view; the result has no true_return.
Trajectory rollout(ObservedEnv& env, const Policy& policy, std::uint64_t seed, std::int64_t id = 0);

}  // namespace oops
