#include "oops/reward.hpp"

#include "oops/assignment.hpp"
#include "oops/errors.hpp"

#include <cmath>
#include <limits>

namespace oops {

void ExpertDataset::validate() const {
  if (trajectories.empty()) throw InputError("expert dataset is empty");
  const Eigen::Index d = trajectories.front().state_dim();
  for (const Trajectory& t : trajectories) {
    t.validate();
    if (t.state_dim() != d) throw InputError("expert dataset: state dimensions differ");
  }
}

ExpertDataset ExpertDataset::first(std::size_t k) const {
  ExpertDataset out{{}, env_id, expert_tag};
  const std::size_t n = std::min(k, trajectories.size());
  out.trajectories.assign(trajectories.begin(), trajectories.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

std::string_view to_string(ExpertSelection sel) {
  return sel == ExpertSelection::kClosest ? "closest" : "average";
}

ExpertSelection parse_expert_selection(std::string_view name) {
  if (name == "closest") return ExpertSelection::kClosest;
  if (name == "average") return ExpertSelection::kAverage;
  throw ConfigError("unknown expert selection `" + std::string(name) + "` (expected closest or average)");
}

void RewardConfig::validate() const {
  metric.validate();
  solver.sinkhorn.validate();
  if (!(reward_scale > 0.0) || !std::isfinite(reward_scale))
    throw ConfigError("reward_scale must be a positive number");
}

namespace {

struct PerExpert {
  TrajectoryDistance dist;
  Eigen::VectorXd rewards;
};

void check_dims(const Trajectory& learner, const ExpertDataset& experts) {
  experts.validate();
  learner.validate();
  if (learner.state_dim() != experts.trajectories.front().state_dim())
    throw DimensionError("learner and expert state dimensions differ");
}

}  // namespace

ExpertMatch select_expert(const Trajectory& learner, const ExpertDataset& experts,
                          const RewardConfig& cfg) {
  check_dims(learner, experts);
  ExpertMatch best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t k = 0; k < experts.size(); ++k) {
    const double d =
        trajectory_distance(learner, experts.trajectories[k], cfg.mode, cfg.metric, cfg.solver).value;
    if (d < best.distance) best = {k, d};
  }
  return best;
}

RewardTable episode_rewards(const Trajectory& learner, const ExpertDataset& experts,
                            const RewardConfig& cfg) {
  cfg.validate();
  check_dims(learner, experts);

  std::vector<PerExpert> per;
  per.reserve(experts.size());
  std::size_t best = 0;
  for (std::size_t k = 0; k < experts.size(); ++k) {
    PerExpert p;
    p.dist = trajectory_distance(learner, experts.trajectories[k], cfg.mode, cfg.metric, cfg.solver);
    p.rewards = -cfg.reward_scale * p.dist.cost.cwiseProduct(p.dist.coupling.plan).rowwise().sum();
    // Strict comparison keeps the lowest index on ties.
    if (k > 0 && p.dist.value < per[best].dist.value) best = k;
    per.push_back(std::move(p));
  }

  RewardTable table;
  table.reward_scale = cfg.reward_scale;
  table.matched_expert_index = best;
  table.matched_expert_id = experts.trajectories[best].id;
  table.cost = per[best].dist.cost;
  table.coupling = per[best].dist.coupling;
  table.coupling_residual = per[best].dist.coupling.residual;
  if (cfg.selection == ExpertSelection::kClosest || per.size() == 1) {
    table.rewards = per[best].rewards;
    table.distance_value = per[best].dist.cost_objective;
  } else {
    table.rewards = Eigen::VectorXd::Zero(per.front().rewards.size());
    double total = 0.0, residual = 0.0;
    for (const PerExpert& p : per) {
      table.rewards += p.rewards;
      total += p.dist.cost_objective;
      residual = std::max(residual, p.dist.coupling.residual);
    }
    const double n = static_cast<double>(per.size());
    table.rewards /= n;
    table.distance_value = total / n;
    table.coupling_residual = residual;
  }
  return table;
}

Eigen::VectorXd transition_rewards(const RewardTable& table, Atomization mode) {
  if (mode != Atomization::kState) return table.rewards;
  const Eigen::Index atoms = table.rewards.size();
  if (atoms < 2) throw InputError("transition_rewards: state atomization needs at least two states");
  Eigen::VectorXd out = table.rewards.tail(atoms - 1);
  out(0) += table.rewards(0);
  return out;
}

StaleBound stale_bound_check(const Trajectory& fresh, const Trajectory& expert,
                             const Coupling<double>& stale_coupling, const RewardConfig& cfg) {
  const DiscreteMeasure<double> mu = atomize(fresh, cfg.mode);
  const DiscreteMeasure<double> nu = atomize(expert, cfg.mode);
  const Eigen::MatrixXd cost = cost_matrix(mu, nu, cfg.metric);
  if (stale_coupling.rows() != cost.rows() || stale_coupling.cols() != cost.cols())
    throw DimensionError("stale_bound_check: stale coupling shape does not match the new trajectory");

  StaleBound out;
  SolverChoice exact{SolverKind::kExact, cfg.solver.sinkhorn};
  out.optimal = transport_cost(cost, solve_coupling(cost, mu.weights, nu.weights, exact));
  out.stale = transport_cost(cost, stale_coupling);
  out.holds = out.optimal <= out.stale + 1e-9;
  return out;
}

}  // namespace oops
