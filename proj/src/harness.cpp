#include "oops/harness.hpp"

#include "oops/actor_critic.hpp"
#include "oops/errors.hpp"
#include "oops/expert.hpp"
#include "oops/gridworld.hpp"
#include "oops/pointmass.hpp"
#include "oops/replay_buffer.hpp"
#include "oops/rng.hpp"
#include "oops/stats.hpp"
#include "oops/tabular_q.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <random>

namespace oops {

namespace fs = std::filesystem;

std::uint64_t episode_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t i) {
  return derive_seed(derive_seed(master, stream), i);
}

ExpertDataset generate_experts(const std::string& env_id, int count, double noise_std, std::uint64_t seed) {
  if (count < 1) throw ConfigError("expert count must be >= 1");
  if (noise_std < 0.0) throw ConfigError("expert noise must be >= 0");
  auto env = make_env(env_id);
  const ExpertPolicySpec spec = default_expert_spec(*env, noise_std);
  ExpertDataset out{{}, env_id, noise_std == 0.0 ? "clean" : "noise=" + format_number(noise_std)};
  for (int k = 0; k < count; ++k)
    out.trajectories.push_back(expert_rollout(*env, spec, episode_seed(seed, streams::kExperts, k), k));
  return out;
}

ExpertDataset load_experts(const RunConfig& cfg) {
  if (cfg.experts.empty()) return generate_experts(cfg.env, cfg.n_experts, 0.0, cfg.seed);
  ExpertDataset all{read_jsonl(cfg.experts), cfg.env, cfg.experts};
  if (all.size() < static_cast<std::size_t>(cfg.n_experts))
    throw DataError(cfg.experts + " holds " + std::to_string(all.size()) + " trajectories, " +
                    std::to_string(cfg.n_experts) + " requested");
  return all.first(static_cast<std::size_t>(cfg.n_experts));
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string to_csv_line(const MetricRow& r) {
  return std::to_string(r.step) + ',' + format_number(r.true_return_mean) + ',' + format_number(r.true_return_std) +
         ',' + format_number(r.proxy_return_mean) + ',' + format_number(r.sinkhorn_distance) + ',' +
         format_number(r.wall_clock_s);
}

double TrainResult::max_identity_error() const {
  double worst = 0.0;
  for (const EpisodeAudit& e : episodes) worst = std::max(worst, e.identity_error);
  return worst;
}

double TrainResult::final_normalized() const {
  if (rows.empty()) throw InputError("no evaluation rows");
  return normalized_score(rows.back().true_return_mean, expert_return);
}

fs::path make_run_dir(const fs::path& root, std::uint64_t seed) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
  const std::string base = std::string("run-") + stamp + "-seed" + std::to_string(seed);
  fs::create_directories(root);
  fs::path dir = root / base;
  for (int k = 2; fs::exists(dir); ++k) dir = root / (base + "-" + std::to_string(k));
  fs::create_directory(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// Learners

namespace {

class Learner {
 public:
  virtual ~Learner() = default;
  virtual Eigen::VectorXd act(const StateVector& state, bool explore, long step) = 0;
  // Updates after an episode of `new_steps` transitions ending at `step`.
  virtual void learn(const ReplayBuffer& buffer, long new_steps, long step) = 0;
  virtual void save(const fs::path& path) const = 0;
};

class TabularLearner final : public Learner {
 public:
  TabularLearner(const GridWorldEnv& grid, const TabularQConfig& cfg, long total_steps, Rng& rng)
      : grid_(grid), cfg_(cfg), total_(total_steps), rng_(rng), q_(grid.num_cells(), kGridActions) {}

  Eigen::VectorXd act(const StateVector& state, bool explore, long step) override {
    const double eps = total_ > 0 ? cfg_.epsilon_at(step, total_) : cfg_.epsilon_end;
    return Eigen::VectorXd::Constant(1, q_.act(grid_.index_of(state), explore, eps, rng_));
  }

  void learn(const ReplayBuffer& buffer, long new_steps, long) override {
    if (buffer.empty()) return;
    std::vector<IndexedTransition> batch(static_cast<std::size_t>(cfg_.batch_size));
    const long updates = new_steps * cfg_.updates_per_step;
    for (long u = 0; u < updates; ++u) {
      const std::vector<std::size_t> idx = buffer.sample_indices(batch.size(), rng_);
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const Transition& t = buffer.at(idx[k]);
        batch[k] = {grid_.index_of(t.state), static_cast<int>(t.action(0)), grid_.index_of(t.next_state), t.reward,
                    t.done};
      }
      q_.update(batch, cfg_);
    }
  }

  void save(const fs::path& path) const override { save_checkpoint(path, q_); }

 private:
  const GridWorldEnv& grid_;
  TabularQConfig cfg_;
  long total_;
  Rng& rng_;
  TabularQ q_;
};

class ActorCriticLearner final : public Learner {
 public:
  ActorCriticLearner(const Environment& env, const ActorCriticConfig& cfg, Rng& rng)
      : cfg_(cfg), rng_(rng), agent_(env.state_dim(), env.action_space().size, cfg, rng) {}

  Eigen::VectorXd act(const StateVector& state, bool explore, long step) override {
    if (explore && step < cfg_.warmup_steps) {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      Eigen::VectorXd a(agent_.actor().outputs());
      for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = u(rng_);
      return a;
    }
    return agent_.act(state, explore, rng_);
  }

  void learn(const ReplayBuffer& buffer, long new_steps, long step) override {
    if (buffer.size() < static_cast<std::size_t>(cfg_.batch_size)) return;
    const long eligible = step - std::max(cfg_.warmup_steps, step - new_steps);
    for (long u = 0; u < eligible * cfg_.updates_per_step; ++u)
      agent_.update(buffer.sample(static_cast<std::size_t>(cfg_.batch_size), rng_));
  }

  void save(const fs::path& path) const override { save_checkpoint(path, agent_); }

 private:
  ActorCriticConfig cfg_;
  Rng& rng_;
  ActorCritic agent_;
};

std::unique_ptr<Learner> make_learner(const Environment& env, const RunConfig& cfg, Rng& rng) {
  if (const auto* grid = dynamic_cast<const GridWorldEnv*>(&env))
    return std::make_unique<TabularLearner>(*grid, cfg.tabular_q, cfg.total_steps, rng);
  return std::make_unique<ActorCriticLearner>(env, cfg.actor_critic, rng);
}

struct Episode {
  Trajectory traj;
  Eigen::VectorXd true_rewards;
  bool terminal = false;
};

// Exploration episode capped at `budget` transitions. True rewards are read
// only for oracle runs; otherwise the learner sees the observed view.
Episode collect(Environment& env, Learner& learner, std::uint64_t seed, long step, long budget, bool want_reward,
                std::int64_t id) {
  ObservedEnv view(env);
  std::vector<StateVector> states{want_reward ? env.reset(seed) : view.reset(seed)};
  std::vector<Eigen::VectorXd> actions;
  std::vector<double> rewards;
  Episode ep;
  bool done = false;
  while (!done && static_cast<long>(actions.size()) < budget) {
    Eigen::VectorXd a = learner.act(states.back(), true, step + static_cast<long>(actions.size()));
    if (want_reward) {
      StepResult r = env.step(a);
      rewards.push_back(r.true_reward);
      done = r.done;
      ep.terminal = r.terminal;
      states.push_back(std::move(r.state));
    } else {
      Observation o = view.step(a);
      done = o.done;
      ep.terminal = o.terminal;
      states.push_back(std::move(o.state));
    }
    actions.push_back(std::move(a));
  }
  ep.traj = make_trajectory(states, &actions, id);
  ep.true_rewards = Eigen::Map<const Eigen::VectorXd>(rewards.data(), static_cast<Eigen::Index>(rewards.size()));
  return ep;
}

class RunFiles {
 public:
  explicit RunFiles(const fs::path& dir) : dir_(dir) {
    fs::create_directories(dir_ / "checkpoints");
    fs::create_directories(dir_ / "trajectories");
    metrics_.open(dir_ / "metrics.csv");
    episodes_.open(dir_ / "episodes.csv");
    timing_.open(dir_ / "timing.csv");
    if (!metrics_ || !episodes_ || !timing_) throw DataError("cannot write to run directory " + dir_.string());
    metrics_ << kMetricsHeader << '\n';
    episodes_ << "episode,step,length,proxy_return,distance_value,identity_error\n";
    timing_ << "step,wall_clock_s\n";
  }

  void metric(const MetricRow& row, double elapsed) {
    metrics_ << to_csv_line(row) << '\n' << std::flush;
    timing_ << row.step << ',' << format_number(elapsed) << '\n' << std::flush;
  }

  void episode(const EpisodeAudit& e) {
    episodes_ << e.episode << ',' << e.step << ',' << e.length << ',' << format_number(e.proxy_return) << ','
              << format_number(e.distance_value) << ',' << format_number(e.identity_error) << '\n';
  }

  void status(const std::string& text) {
    episodes_.flush();
    std::ofstream(dir_ / "status") << text << '\n';
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::ofstream metrics_, episodes_, timing_;
};

}  // namespace

TrainResult train(const RunConfig& cfg, const ExpertDataset& experts, const std::optional<fs::path>& out_root) {
  cfg.validate();
  try {
    experts.validate();
  } catch (const InputError& e) {
    throw DataError(std::string("expert data: ") + e.what());
  }
  auto env = make_env(cfg.env);
  if (experts.trajectories.front().state_dim() != env->state_dim())
    throw DataError("expert trajectories do not match the " + cfg.env + " state dimension");
  if (cfg.reward.mode == Atomization::kStateAction) {
    for (const Trajectory& t : experts.trajectories)
      if (!t.has_actions()) throw DataError("state-action rewards need expert actions");
  }

  const auto started = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  TrainResult result;
  std::optional<RunFiles> files;
  if (out_root) {
    files.emplace(make_run_dir(*out_root, cfg.seed));
    result.run_dir = files->dir();
    std::ofstream(result.run_dir / "config.snapshot") << to_json(cfg).dump(2) << '\n';
    write_jsonl(result.run_dir / "trajectories" / "experts.jsonl", experts.trajectories);
  }

  Rng rng(derive_seed(cfg.seed, streams::kAgent));
  std::unique_ptr<Learner> learner = make_learner(*env, cfg, rng);
  ReplayBuffer buffer(cfg.buffer_capacity);

  std::vector<std::uint64_t> eval_seeds;
  std::vector<double> expert_returns;
  for (int k = 0; k < cfg.eval_episodes; ++k) {
    eval_seeds.push_back(episode_seed(cfg.seed, streams::kEvalReset, k));
    expert_returns.push_back(*expert_rollout(*env, default_expert_spec(*env), eval_seeds.back()).true_return);
  }
  result.expert_return = mean(expert_returns);

  RewardConfig distance_cfg = cfg.reward;
  distance_cfg.solver.kind = SolverKind::kSinkhorn;
  std::vector<Trajectory> last_eval;

  const auto evaluate = [&](long step) {
    Learner& l = *learner;
    const Policy greedy = [&l, step](const StateVector& s) { return l.act(s, false, step); };
    std::vector<double> returns, proxies, distances;
    last_eval.clear();
    for (std::size_t k = 0; k < eval_seeds.size(); ++k) {
      Trajectory t = rollout(*env, greedy, eval_seeds[k], static_cast<std::int64_t>(k));
      returns.push_back(*t.true_return);
      proxies.push_back(episode_rewards(t, experts, cfg.reward).proxy_return());
      distances.push_back(select_expert(t, experts, distance_cfg).distance);
      last_eval.push_back(std::move(t));
    }
    MetricRow row{step, mean(returns), stddev(returns), mean(proxies), mean(distances), 0.0};
    const double seconds = elapsed();
    if (cfg.record_wall_clock) row.wall_clock_s = seconds;
    result.rows.push_back(row);
    if (files) {
      files->metric(row, seconds);
      if (cfg.save_checkpoints)
        learner->save(files->dir() / "checkpoints" / ("step-" + std::to_string(step) + ".ckpt"));
    }
  };

  const bool oracle = cfg.reward_source == RewardSource::kTrue;
  long step = 0, episode = 0, next_eval = cfg.eval_interval;
  try {
    evaluate(0);
    while (step < cfg.total_steps) {
      Episode ep = collect(*env, *learner, episode_seed(cfg.seed, streams::kTrainReset, episode), step,
                           cfg.total_steps - step, oracle, episode);
      const long length = ep.traj.num_transitions();
      step += length;
      if (length > 0) {
        if (oracle) {
          buffer.push_episode(ep.traj, ep.true_rewards, ep.terminal);
        } else {
          const RewardTable table = episode_rewards(ep.traj, experts, cfg.reward);
          buffer_push_episode(buffer, ep.traj, table, cfg.reward.mode, ep.terminal);
          const double proxy = table.proxy_return();
          EpisodeAudit audit{episode, step, length, proxy, table.distance_value,
                             std::abs(proxy + table.reward_scale * table.distance_value)};
          result.episodes.push_back(audit);
          if (files) files->episode(audit);
        }
        learner->learn(buffer, length, step);
      }
      ++episode;
      if (step >= next_eval) {
        evaluate(step);
        while (next_eval <= step) next_eval += cfg.eval_interval;
      }
    }
    if (result.rows.back().step != step) evaluate(step);
  } catch (const DivergenceError& e) {
    result.failed = true;
    result.failure = e.what();
  }

  if (files) {
    if (!last_eval.empty()) write_jsonl(files->dir() / "trajectories" / "eval-final.jsonl", last_eval);
    if (cfg.save_checkpoints && !result.failed) learner->save(files->dir() / "checkpoints" / "final.ckpt");
    files->status(result.failed ? "failed: " + result.failure : "ok");
  }
  return result;
}

TrainResult train(const RunConfig& cfg, const std::optional<fs::path>& out_root) {
  cfg.validate();
  return train(cfg, load_experts(cfg), out_root);
}

// ---------------------------------------------------------------------------
// Calibration

std::vector<double> default_noise_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 15; ++k) grid.push_back(k / 10.0);
  return grid;
}

std::vector<double> parse_grid(std::string_view spec) {
  const std::string text(spec);
  double a = 0.0, b = 0.0, s = 0.0;
  char c1 = 0, c2 = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf%c%lf%c%lf%c", &a, &c1, &b, &c2, &s, &tail) != 5 || c1 != ':' || c2 != ':')
    throw ConfigError("grid `" + text + "` is not a:b:step");
  if (!(s > 0.0) || b < a) throw ConfigError("grid `" + text + "` needs step > 0 and b >= a");
  std::vector<double> grid;
  const long n = static_cast<long>(std::floor((b - a) / s + 1e-9));
  for (long k = 0; k <= n; ++k) grid.push_back(a + static_cast<double>(k) * s);
  return grid;
}

CalibrationResult calibrate(const CalibrationConfig& cfg, const ExpertDataset& experts) {
  if (cfg.episodes_per_level < 1) throw ConfigError("episodes_per_level must be >= 1");
  cfg.reward.validate();
  const std::vector<double> grid = cfg.noise_grid.empty() ? default_noise_grid() : cfg.noise_grid;
  auto env = make_env(cfg.env);
  CalibrationResult out;
  std::vector<double> trues, proxies;
  for (double noise : grid) {
    if (noise < 0.0) throw ConfigError("noise levels must be >= 0");
    const ExpertPolicySpec spec = default_expert_spec(*env, noise);
    std::vector<double> ret, proxy;
    for (int k = 0; k < cfg.episodes_per_level; ++k) {
      const Trajectory t = expert_rollout(*env, spec, episode_seed(cfg.seed, streams::kEvalReset, k), k);
      ret.push_back(*t.true_return);
      proxy.push_back(episode_rewards(t, experts, cfg.reward).proxy_return());
    }
    out.rows.push_back({noise, mean(ret), mean(proxy)});
    trues.push_back(out.rows.back().true_return_mean);
    proxies.push_back(out.rows.back().proxy_return_mean);
  }
  out.spearman = spearman(trues, proxies);
  out.pearson = pearson(trues, proxies);
  return out;
}

// ---------------------------------------------------------------------------
// Solver sweep

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int k = 0; k < 16; ++k) grid.push_back(std::pow(10.0, -3.0 + 3.0 * k / 15.0));
  return grid;
}

std::vector<TrajectoryPair> pointmass_pairs(int count, double max_noise, std::uint64_t seed) {
  PointMassConfig pc;
  pc.terminate_at_goal = false;
  PointMassEnv env(pc);
  Rng rng(derive_seed(seed, streams::kNoise));
  std::uniform_real_distribution<double> noise(0.0, max_noise);
  std::vector<TrajectoryPair> pairs;
  for (int k = 0; k < count; ++k) {
    const double l1 = noise(rng), l2 = noise(rng);
    Trajectory a = expert_rollout(env, default_expert_spec(env, l1), episode_seed(seed, streams::kTrainReset, 2 * k));
    Trajectory b =
        expert_rollout(env, default_expert_spec(env, l2), episode_seed(seed, streams::kTrainReset, 2 * k + 1));
    pairs.emplace_back(std::move(a), std::move(b));
  }
  return pairs;
}

SweepResult solver_sweep(const std::vector<TrajectoryPair>& pairs, const std::vector<double>& lambdas,
                         const RewardConfig& reward) {
  if (pairs.empty()) throw InputError("solver_sweep: no trajectory pairs");
  reward.validate();
  SweepResult out;
  for (double lambda : lambdas) out.rows.push_back({"sinkhorn", lambda, 0.0});
  out.rows.push_back({"greedy", std::nullopt, 0.0});
  out.rows.push_back({"exact", std::nullopt, 0.0});

  for (const auto& [x, y] : pairs) {
    const DiscreteMeasure<double> mu = atomize(x, reward.mode), nu = atomize(y, reward.mode);
    const Eigen::MatrixXd cost = cost_matrix(mu, nu, reward.metric);
    std::vector<double> row;
    for (double lambda : lambdas) {
      SolverChoice choice{SolverKind::kSinkhorn, reward.solver.sinkhorn};
      choice.sinkhorn.lambda = lambda;
      row.push_back(transport_cost(cost, solve_coupling(cost, mu.weights, nu.weights, choice)));
    }
    for (SolverKind kind : {SolverKind::kGreedy, SolverKind::kExact})
      row.push_back(transport_cost(cost, solve_coupling(cost, mu.weights, nu.weights, {kind, reward.solver.sinkhorn})));
    out.costs.push_back(std::move(row));
  }
  for (std::size_t c = 0; c < out.rows.size(); ++c) {
    double total = 0.0;
    for (const auto& row : out.costs) total += row[c];
    out.rows[c].mean_distance = total / static_cast<double>(out.costs.size());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Occupancy

OccupancyRow occupancy_eval(Environment& env, const Policy& policy, const std::string& name,
                            const ExpertDataset& experts, const DistanceMetric& metric, int episodes,
                            std::uint64_t seed) {
  if (episodes < 1) throw ConfigError("occupancy_eval: episodes must be >= 1");
  experts.validate();
  bool with_actions = true;
  for (const Trajectory& e : experts.trajectories) with_actions = with_actions && e.has_actions();

  const SolverChoice solver{SolverKind::kExact, {}};
  double s = 0.0, ss = 0.0, sa = 0.0;
  for (int k = 0; k < episodes; ++k) {
    const Trajectory t = rollout(env, policy, episode_seed(seed, streams::kEvalReset, k), k);
    for (const Trajectory& e : experts.trajectories) {
      s += trajectory_distance(t, e, Atomization::kState, metric, solver).value;
      ss += trajectory_distance(t, e, Atomization::kStateTransition, metric, solver).value;
      if (with_actions) sa += trajectory_distance(t, e, Atomization::kStateAction, metric, solver).value;
    }
  }
  const double n = static_cast<double>(episodes) * static_cast<double>(experts.size());
  OccupancyRow row{name, s / n, ss / n, std::nullopt};
  if (with_actions) row.state_action = sa / n;
  return row;
}

Policy load_policy(const fs::path& checkpoint, const Environment& env) {
  const std::string kind = checkpoint_kind(checkpoint);
  if (kind == "tabular-q") {
    const auto* grid = dynamic_cast<const GridWorldEnv*>(&env);
    if (!grid) throw DataError(checkpoint.string() + ": tabular checkpoints need the gridworld");
    auto q = std::make_shared<TabularQ>(grid->num_cells(), kGridActions);
    load_checkpoint(checkpoint, *q);
    auto shape = std::make_shared<GridWorldEnv>(grid->config());
    return [q, shape](const StateVector& s) { return Eigen::VectorXd::Constant(1, q->greedy(shape->index_of(s))); };
  }
  if (kind == "actor-critic") {
    auto agent = std::make_shared<ActorCritic>(load_actor_critic(checkpoint));
    if (agent->actor().inputs() != env.state_dim() || agent->actor().outputs() != env.action_space().size)
      throw DataError(checkpoint.string() + ": network shape does not match the environment");
    return [agent](const StateVector& s) {
      Rng unused(0);
      return agent->act(s, false, unused);
    };
  }
  throw DataError(checkpoint.string() + ": unknown checkpoint kind `" + kind + "`");
}

Policy random_policy(const Environment& env, std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  const ActionSpace space = env.action_space();
  if (space.discrete) {
    return [rng, space](const StateVector&) {
      std::uniform_int_distribution<int> u(0, space.size - 1);
      return Eigen::VectorXd::Constant(1, u(*rng));
    };
  }
  return [rng, space](const StateVector&) {
    std::uniform_real_distribution<double> u(space.low, space.high);
    Eigen::VectorXd a(space.size);
    for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = u(*rng);
    return a;
  };
}

// ---------------------------------------------------------------------------
// Ablations

std::string_view to_string(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::kOccupancy: return "occupancy";
    case AblationAxis::kSolver: return "solver";
    case AblationAxis::kLambda: return "lambda";
    case AblationAxis::kMetric: return "metric";
  }
  return "?";
}

AblationAxis parse_ablation_axis(std::string_view name) {
  for (AblationAxis a : {AblationAxis::kOccupancy, AblationAxis::kSolver, AblationAxis::kLambda, AblationAxis::kMetric})
    if (name == to_string(a)) return a;
  throw ConfigError("unknown ablation axis `" + std::string(name) + "`");
}

std::vector<std::string> default_axis_values(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::kOccupancy: return {"s", "ss", "sa"};
    case AblationAxis::kSolver: return {"sinkhorn", "greedy", "exact"};
    case AblationAxis::kLambda: return {"0.005", "0.05", "0.1", "0.5"};
    case AblationAxis::kMetric: return {"euclidean", "sqrt-euclidean", "cosine", "euclidean-w2"};
  }
  return {};
}

RunConfig with_axis_value(const RunConfig& base, AblationAxis axis, const std::string& value) {
  RunConfig cfg = base;
  switch (axis) {
    case AblationAxis::kOccupancy:
      try {
        cfg.reward.mode = parse_atomization(value);
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
      break;
    case AblationAxis::kSolver: cfg.reward.solver.kind = parse_solver(value); break;
    case AblationAxis::kLambda: {
      char* end = nullptr;
      cfg.reward.solver.sinkhorn.lambda = std::strtod(value.c_str(), &end);
      if (value.empty() || *end != '\0') throw ConfigError("lambda value `" + value + "` is not a number");
      break;
    }
    case AblationAxis::kMetric: cfg.reward.metric = DistanceMetric::parse(value); break;
  }
  cfg.validate();
  return cfg;
}

namespace {

double mean_final_normalized(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds) {
  std::vector<double> scores;
  for (std::uint64_t seed : seeds) {
    RunConfig run = cfg;
    run.seed = seed;
    const TrainResult r = train(run);
    if (r.failed) throw DivergenceError("ablation run with seed " + std::to_string(seed) + " diverged: " + r.failure);
    scores.push_back(r.final_normalized());
  }
  return mean(scores);
}

}  // namespace

std::vector<AblationRow> ablation_grid(const RunConfig& base, AblationAxis axis, const std::vector<std::string>& values,
                                       const std::vector<std::uint64_t>& seeds) {
  if (values.empty()) throw ConfigError("ablation needs at least one value");
  if (seeds.empty()) throw ConfigError("ablation needs at least one seed");
  const double reference = mean_final_normalized(base, seeds);
  const nlohmann::json base_json = to_json(base);
  std::vector<AblationRow> rows;
  for (const std::string& value : values) {
    const RunConfig cfg = with_axis_value(base, axis, value);
    const double score = to_json(cfg) == base_json ? reference : mean_final_normalized(cfg, seeds);
    const double diff = reference == 0.0 ? 0.0 : 100.0 * (score - reference) / std::abs(reference);
    rows.push_back({std::string(to_string(axis)), value, score, diff});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV output

namespace {

std::ofstream open_csv(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_metrics_csv(const fs::path& path, const std::vector<MetricRow>& rows) {
  std::ofstream out = open_csv(path);
  out << kMetricsHeader << '\n';
  for (const MetricRow& r : rows) out << to_csv_line(r) << '\n';
}

void write_calibration_csv(const fs::path& path, const CalibrationResult& result) {
  std::ofstream out = open_csv(path);
  out << "noise_std,true_return_mean,proxy_return_mean\n";
  for (const CalibrationRow& r : result.rows)
    out << format_number(r.noise_std) << ',' << format_number(r.true_return_mean) << ','
        << format_number(r.proxy_return_mean) << '\n';
}

void write_sweep_csv(const fs::path& path, const SweepResult& result) {
  std::ofstream out = open_csv(path);
  out << "solver,lambda,mean_distance\n";
  for (const SweepRow& r : result.rows)
    out << r.solver << ',' << (r.lambda ? format_number(*r.lambda) : "") << ',' << format_number(r.mean_distance)
        << '\n';
}

void write_occupancy_csv(const fs::path& path, const std::vector<OccupancyRow>& rows) {
  std::ofstream out = open_csv(path);
  out << "policy,state,state_transition,state_action\n";
  for (const OccupancyRow& r : rows)
    out << r.policy << ',' << format_number(r.state) << ',' << format_number(r.state_transition) << ','
        << (r.state_action ? format_number(*r.state_action) : "") << '\n';
}

void write_ablation_csv(const fs::path& path, const std::vector<AblationRow>& rows) {
  std::ofstream out = open_csv(path);
  out << "axis,value,normalized_return,percent_diff\n";
  for (const AblationRow& r : rows)
    out << r.axis << ',' << r.value << ',' << format_number(r.normalized_return) << ','
        << format_number(r.percent_diff) << '\n';
}

}  // namespace oops
