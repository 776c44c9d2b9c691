#include "oops/env.hpp"
#include "oops/errors.hpp"
#include "oops/expert.hpp"
#include "oops/gridworld.hpp"
#include "oops/pointmass.hpp"
#include "oops/rng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace oops {

namespace {

template <typename Env>
Trajectory run_episode(Env& env, const Policy& policy, std::uint64_t seed, std::int64_t id,
                       double* true_return) {
  std::vector<StateVector> states{env.reset(seed)};
  std::vector<Eigen::VectorXd> actions;
  double ret = 0.0;
  while (true) {
    Eigen::VectorXd a = policy(states.back());
    auto r = env.step(a);
    if constexpr (std::is_same_v<decltype(r), StepResult>) ret += r.true_reward;
    actions.push_back(std::move(a));
    states.push_back(std::move(r.state));
    if (r.done) break;
  }
  if (true_return) *true_return = ret;
  return make_trajectory(states, &actions, id);
}

}  // namespace

Trajectory rollout(Environment& env, const Policy& policy, std::uint64_t seed, std::int64_t id) {
  double ret = 0.0;
  Trajectory t = run_episode(env, policy, seed, id, &ret);
  t.true_return = ret;
  return t;
}

Trajectory rollout(ObservedEnv& env, const Policy& policy, std::uint64_t seed, std::int64_t id) {
  return run_episode(env, policy, seed, id, nullptr);
}

// ---------------------------------------------------------------------------
// PointMassEnv

PointMassEnv::PointMassEnv(PointMassConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.horizon < 1 || !(cfg_.dt > 0.0)) throw ConfigError("pointmass: horizon and dt must be positive");
}

StateVector PointMassEnv::reset(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-cfg_.start_halfwidth, cfg_.start_halfwidth);
  const double x = cfg_.start_center.x() + u(rng);
  const double y = cfg_.start_center.y() + u(rng);
  state_ << x, y, 0.0, 0.0;
  steps_ = 0;
  done_ = false;
  return state_;
}

void PointMassEnv::set_state(const Eigen::Vector4d& state) {
  state_ = state;
  steps_ = 0;
  done_ = false;
}

StepResult PointMassEnv::step(const Eigen::VectorXd& action) {
  if (done_) throw EpisodeFinished("pointmass: step after episode end");
  if (action.size() != 2) throw DimensionError("pointmass: action must have 2 entries");
  const Eigen::Vector2d a = action.cwiseMax(-1.0).cwiseMin(1.0);
  const Eigen::Vector2d v = (state_.tail<2>() + a * cfg_.dt).cwiseMax(-cfg_.max_speed).cwiseMin(cfg_.max_speed);
  const Eigen::Vector2d x = (state_.head<2>() + v * cfg_.dt).cwiseMax(-cfg_.arena).cwiseMin(cfg_.arena);
  state_ << x, v;
  ++steps_;
  const double dist = (x - cfg_.goal).norm();
  const bool at_goal = cfg_.terminate_at_goal && dist < cfg_.goal_radius;
  done_ = at_goal || steps_ >= cfg_.horizon;
  return {state_, -dist, done_, at_goal};
}

std::unique_ptr<Environment> PointMassEnv::clone() const { return std::make_unique<PointMassEnv>(*this); }

// ---------------------------------------------------------------------------
// GridWorldEnv

GridWorldEnv::GridWorldEnv(GridWorldConfig cfg) : cfg_(std::move(cfg)) {
  const auto inside = [&](Cell c) {
    return c.first >= 0 && c.second >= 0 && c.first < cfg_.size && c.second < cfg_.size;
  };
  if (cfg_.size < 2) throw ConfigError("gridworld: size must be at least 2");
  if (!inside(cfg_.start) || !inside(cfg_.goal)) throw ConfigError("gridworld: start/goal outside the grid");
  if (is_wall(cfg_.start) || is_wall(cfg_.goal)) throw ConfigError("gridworld: start/goal on a wall");
  if (cfg_.horizon < 1) throw ConfigError("gridworld: horizon must be positive");
}

StateVector GridWorldEnv::embed(Cell c) const {
  const double scale = 1.0 / static_cast<double>(cfg_.size - 1);
  return Eigen::Vector2d(c.first * scale, c.second * scale);
}

Cell GridWorldEnv::cell_of(const StateVector& state) const {
  if (state.size() != 2) throw DimensionError("gridworld: state must have 2 entries");
  const double n = static_cast<double>(cfg_.size - 1);
  const int r = static_cast<int>(std::lround(state(0) * n));
  const int c = static_cast<int>(std::lround(state(1) * n));
  if (r < 0 || c < 0 || r >= cfg_.size || c >= cfg_.size) throw InputError("gridworld: state outside the grid");
  return {r, c};
}

int GridWorldEnv::index_of(const StateVector& state) const {
  const Cell c = cell_of(state);
  return c.first * cfg_.size + c.second;
}

Cell GridWorldEnv::move(Cell from, int action) const {
  static constexpr int kDr[kGridActions] = {-1, 1, 0, 0};
  static constexpr int kDc[kGridActions] = {0, 0, -1, 1};
  if (action < 0 || action >= kGridActions) throw InputError("gridworld: action index out of range");
  const Cell to{from.first + kDr[action], from.second + kDc[action]};
  if (to.first < 0 || to.second < 0 || to.first >= cfg_.size || to.second >= cfg_.size || is_wall(to))
    return from;
  return to;
}

StateVector GridWorldEnv::reset(std::uint64_t /*seed*/) {
  agent_ = cfg_.start;
  steps_ = 0;
  done_ = false;
  return embed(agent_);
}

StepResult GridWorldEnv::step(const Eigen::VectorXd& action) {
  if (done_) throw EpisodeFinished("gridworld: step after episode end");
  if (action.size() != 1) throw DimensionError("gridworld: action must be a single index");
  agent_ = move(agent_, static_cast<int>(std::lround(action(0))));
  ++steps_;
  const bool at_goal = agent_ == cfg_.goal;
  done_ = at_goal || steps_ >= cfg_.horizon;
  return {embed(agent_), at_goal ? 0.0 : -1.0, done_, at_goal};
}

std::unique_ptr<Environment> GridWorldEnv::clone() const { return std::make_unique<GridWorldEnv>(*this); }

std::vector<int> GridWorldEnv::distances_to_goal() const {
  const int n = cfg_.size;
  std::vector<int> dist(static_cast<std::size_t>(n * n), -1);
  std::deque<Cell> queue{cfg_.goal};
  dist[static_cast<std::size_t>(cfg_.goal.first * n + cfg_.goal.second)] = 0;
  // Moves are reversible, so BFS from the goal gives steps-to-goal.
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    const int d = dist[static_cast<std::size_t>(c.first * n + c.second)];
    for (int a = 0; a < kGridActions; ++a) {
      const Cell next = move(c, a);
      auto& slot = dist[static_cast<std::size_t>(next.first * n + next.second)];
      if (slot < 0) {
        slot = d + 1;
        queue.push_back(next);
      }
    }
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Experts

Policy make_expert_policy(const Environment& env, const ExpertPolicySpec& spec, std::uint64_t seed) {
  if (spec.noise_std < 0.0) throw ConfigError("expert noise_std must be >= 0");
  auto rng = std::make_shared<Rng>(derive_seed(seed, 0xE0));
  if (spec.kind == ExpertKind::kPdController) {
    const auto* pm = dynamic_cast<const PointMassEnv*>(&env);
    if (!pm) throw ConfigError("pd-controller expert needs the pointmass environment");
    const Eigen::Vector2d goal = pm->config().goal;
    const double noise = spec.noise_std;
    return [goal, noise, rng](const StateVector& s) -> Eigen::VectorXd {
      Eigen::Vector2d a = kPdGainP * (goal - s.head<2>()) - kPdGainD * s.tail<2>();
      if (noise > 0.0) {
        std::normal_distribution<double> eps(0.0, noise);
        a.x() += eps(*rng);
        a.y() += eps(*rng);
      }
      return a.cwiseMax(-1.0).cwiseMin(1.0);
    };
  }
  const auto* gw = dynamic_cast<const GridWorldEnv*>(&env);
  if (!gw) throw ConfigError("shortest-path expert needs the gridworld environment");
  auto grid = std::make_shared<GridWorldEnv>(*gw);
  auto dist = std::make_shared<std::vector<int>>(grid->distances_to_goal());
  const double p_random = std::min(spec.noise_std, 1.0);
  return [grid, dist, p_random, rng](const StateVector& s) -> Eigen::VectorXd {
    if (p_random > 0.0) {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      if (coin(*rng) < p_random) {
        std::uniform_int_distribution<int> pick(0, kGridActions - 1);
        return Eigen::VectorXd::Constant(1, pick(*rng));
      }
    }
    const Cell here = grid->cell_of(s);
    const int n = grid->config().size;
    int best = 0, best_d = -1;
    for (int a = 0; a < kGridActions; ++a) {
      const Cell next = grid->move(here, a);
      const int d = (*dist)[static_cast<std::size_t>(next.first * n + next.second)];
      if (d >= 0 && (best_d < 0 || d < best_d)) {
        best = a;
        best_d = d;
      }
    }
    return Eigen::VectorXd::Constant(1, best);
  };
}

ExpertPolicySpec default_expert_spec(const Environment& env, double noise_std) {
  const bool grid = dynamic_cast<const GridWorldEnv*>(&env) != nullptr;
  return {grid ? ExpertKind::kShortestPath : ExpertKind::kPdController, noise_std};
}

Trajectory expert_rollout(Environment& env, const ExpertPolicySpec& spec, std::uint64_t seed,
                          std::int64_t id) {
  return rollout(env, make_expert_policy(env, spec, seed), seed, id);
}

std::unique_ptr<Environment> make_env(std::string_view env_id) {
  if (env_id == "pointmass") return std::make_unique<PointMassEnv>();
  if (env_id == "gridworld") return std::make_unique<GridWorldEnv>();
  throw ConfigError("unknown environment `" + std::string(env_id) + "` (expected pointmass or gridworld)");
}

}  // namespace oops
