#pragma once

#include "oops/env.hpp"

#include <Eigen/Dense>

#include <set>
#include <utility>
#include <vector>

namespace oops {

using Cell = std::pair<int, int>;  // (row, col)

enum GridAction : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr int kGridActions = 4;

struct GridWorldConfig {
  int size = 8;
  Cell start{0, 0};
  Cell goal{7, 7};
  std::set<Cell> walls;
  int horizon = 64;
};

// Deterministic N x N grid. The observed state is the agent cell embedded as
// (row / (N-1), col / (N-1)). Moves into walls or off the grid are no-ops.
// Reward is -1 per step, 0 on the step that enters the goal (terminal).
class GridWorldEnv final : public Environment {
 public:
  explicit GridWorldEnv(GridWorldConfig cfg = {});

  std::string id() const override { return "gridworld"; }
  StateVector reset(std::uint64_t seed) override;
  StepResult step(const Eigen::VectorXd& action) override;
  int state_dim() const override { return 2; }
  ActionSpace action_space() const override { return {true, kGridActions, 0.0, kGridActions - 1.0}; }
  int horizon() const override { return cfg_.horizon; }
  std::unique_ptr<Environment> clone() const override;

  int num_cells() const { return cfg_.size * cfg_.size; }
  StateVector embed(Cell c) const;
  Cell cell_of(const StateVector& state) const;
  int index_of(const StateVector& state) const;
  Cell move(Cell from, int action) const;
  bool is_wall(Cell c) const { return cfg_.walls.count(c) > 0; }
  Cell agent() const { return agent_; }
  const GridWorldConfig& config() const { return cfg_; }

  // Steps-to-goal for every cell by breadth-first search (-1 if unreachable),
  // indexed row * size + col.
  std::vector<int> distances_to_goal() const;

 private:
  GridWorldConfig cfg_;
  Cell agent_{0, 0};
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace oops
