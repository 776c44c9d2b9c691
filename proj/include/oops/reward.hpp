#pragma once

#include "oops/distance.hpp"
#include "oops/measure.hpp"
#include "oops/metric.hpp"
#include "oops/trajectory.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace oops {

struct ExpertDataset {
  std::vector<Trajectory> trajectories;
  std::string env_id;
  std::string expert_tag;

  std::size_t size() const { return trajectories.size(); }
  bool empty() const { return trajectories.empty(); }
  // Throws InputError when empty or when state dimensions disagree.
  void validate() const;
  // First k trajectories in file order.
  ExpertDataset first(std::size_t k) const;
};

enum class ExpertSelection { kClosest, kAverage };

std::string_view to_string(ExpertSelection sel);
ExpertSelection parse_expert_selection(std::string_view name);

struct RewardConfig {
  Atomization mode = Atomization::kStateTransition;
  DistanceMetric metric;  // W1 with sqrt-euclidean ground distance
  SolverChoice solver;    // Sinkhorn, lambda 0.05, 20000 iterations
  ExpertSelection selection = ExpertSelection::kClosest;
  double reward_scale = 1.0;

  void validate() const;
};

// Per-atom proxy rewards for one learner episode.
struct RewardTable {
  Eigen::VectorXd rewards;
  // Expert used under `closest` selection; under `average` the nearest one is
  // still reported.
  std::int64_t matched_expert_id = 0;
  std::size_t matched_expert_index = 0;
  // Transport cost <C, P> against the selected expert (mean over experts
  // under `average`). -sum(rewards) == reward_scale * distance_value.
  double distance_value = 0.0;
  double reward_scale = 1.0;
  double coupling_residual = 0.0;
  Eigen::MatrixXd cost;
  Coupling<double> coupling;

  double proxy_return() const { return rewards.sum(); }
};

struct ExpertMatch {
  std::size_t index = 0;
  double distance = 0.0;
};

// Nearest expert trajectory by trajectory_distance; ties go to the lower index.
ExpertMatch select_expert(const Trajectory& learner, const ExpertDataset& experts,
                          const RewardConfig& cfg);

// r_t = -scale * sum_j C(t, j) P(t, j) for the selected expert's coupling P.
RewardTable episode_rewards(const Trajectory& learner, const ExpertDataset& experts,
                            const RewardConfig& cfg);

// Spreads per-atom rewards onto the trajectory's transitions, preserving the
// sum. Transition-type atomizations map one-to-one; under state atomization
// transition t receives the reward of the state it reaches, and the
// initial-state reward is added to the first transition.
Eigen::VectorXd transition_rewards(const RewardTable& table, Atomization mode);

struct StaleBound {
  double optimal = 0.0;  // best achievable cost for the new trajectory
  double stale = 0.0;    // cost of the new trajectory under the old coupling
  bool holds = false;
};

// Cost of `fresh` against `expert` under a previously computed feasible
// coupling, compared with the optimal cost for `fresh`. The exact solver is
// used for the optimum when sizes allow, tight Sinkhorn otherwise.
StaleBound stale_bound_check(const Trajectory& fresh, const Trajectory& expert,
                             const Coupling<double>& stale_coupling, const RewardConfig& cfg);

}  // namespace oops
