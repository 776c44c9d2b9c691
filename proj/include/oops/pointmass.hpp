#pragma once

#include "oops/env.hpp"

#include <Eigen/Dense>

namespace oops {

struct PointMassConfig {
  Eigen::Vector2d goal{-3.0, -3.0};
  Eigen::Vector2d start_center{-4.0, -4.0};
  double start_halfwidth = 0.5;
  double dt = 0.1;
  int horizon = 50;
  double goal_radius = 0.1;
  bool terminate_at_goal = true;
  double arena = 5.0;
  double max_speed = 2.0;
};

// 2-D double integrator. State (x, y, vx, vy), action (ax, ay) in [-1, 1]^2.
// Semi-implicit Euler: v' = clip(v + a dt), x' = clip(x + v' dt).
// True reward is -|x' - goal|.
class PointMassEnv final : public Environment {
 public:
  explicit PointMassEnv(PointMassConfig cfg = {});

  std::string id() const override { return "pointmass"; }
  StateVector reset(std::uint64_t seed) override;
  StepResult step(const Eigen::VectorXd& action) override;
  int state_dim() const override { return 4; }
  ActionSpace action_space() const override { return {false, 2, -1.0, 1.0}; }
  int horizon() const override { return cfg_.horizon; }
  std::unique_ptr<Environment> clone() const override;

  // Places the system in an arbitrary state (tests, scripted starts).
  void set_state(const Eigen::Vector4d& state);
  const Eigen::Vector4d& state() const { return state_; }
  const PointMassConfig& config() const { return cfg_; }

 private:
  PointMassConfig cfg_;
  Eigen::Vector4d state_ = Eigen::Vector4d::Zero();
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace oops
