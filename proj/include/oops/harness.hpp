#pragma once

#include "oops/config.hpp"
#include "oops/env.hpp"
#include "oops/reward.hpp"
#include "oops/trajectory.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oops {

// Seed streams derived from a run's master seed.
namespace streams {
inline constexpr std::uint64_t kAgent = 1;
inline constexpr std::uint64_t kTrainReset = 2;
inline constexpr std::uint64_t kEvalReset = 3;
inline constexpr std::uint64_t kExperts = 4;
inline constexpr std::uint64_t kNoise = 5;
}  // namespace streams

// Reset seed of the i-th episode drawn from `stream` of `master`.
std::uint64_t episode_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t i);

// `count` expert rollouts with ids 0..count-1 and reset seeds from the
// kExperts stream of `seed`.
ExpertDataset generate_experts(const std::string& env_id, int count, double noise_std, std::uint64_t seed);

// First `cfg.n_experts` trajectories of `cfg.experts`, or generated clean
// demonstrations when no file is configured.
ExpertDataset load_experts(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Training

inline constexpr std::string_view kMetricsHeader =
    "step,true_return_mean,true_return_std,proxy_return_mean,sinkhorn_distance,wall_clock_s";

struct MetricRow {
  long step = 0;
  double true_return_mean = 0.0;
  double true_return_std = 0.0;
  double proxy_return_mean = 0.0;
  double sinkhorn_distance = 0.0;
  double wall_clock_s = 0.0;
};

std::string to_csv_line(const MetricRow& row);

// Reward-sum identity check for one training episode.
struct EpisodeAudit {
  long episode = 0;
  long step = 0;
  long length = 0;
  double proxy_return = 0.0;
  double distance_value = 0.0;
  double identity_error = 0.0;  // |sum r + scale * distance_value|
};

struct TrainResult {
  std::filesystem::path run_dir;  // empty when nothing was written
  std::vector<MetricRow> rows;
  std::vector<EpisodeAudit> episodes;
  // Mean true return of the clean scripted expert over the evaluation seeds.
  double expert_return = 0.0;
  bool failed = false;
  std::string failure;

  double max_identity_error() const;
  // normalized_score of the last evaluation row.
  double final_normalized() const;
};

// A fresh `<root>/run-<timestamp>-seed<N>` directory; never reuses one.
std::filesystem::path make_run_dir(const std::filesystem::path& root, std::uint64_t seed);

// Collect an episode with exploration, label it with proxy rewards against
// the experts, push it to the replay buffer, update the agent; evaluate every
// `eval_interval` steps and once more at the end. With an output root the
// run directory holds config.snapshot, metrics.csv, episodes.csv, timing.csv,
// status, checkpoints/ and trajectories/. A non-finite loss stops the run
// with `failed` set and the rows collected so far kept.
TrainResult train(const RunConfig& cfg, const ExpertDataset& experts,
                  const std::optional<std::filesystem::path>& out_root = std::nullopt);
TrainResult train(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_root = std::nullopt);

// ---------------------------------------------------------------------------
// Calibration

struct CalibrationConfig {
  std::string env = "pointmass";
  std::vector<double> noise_grid;  // empty: 0, 0.1, ..., 1.5
  int episodes_per_level = 5;
  RewardConfig reward;
  std::uint64_t seed = 0;
};

struct CalibrationRow {
  double noise_std = 0.0;
  double true_return_mean = 0.0;
  double proxy_return_mean = 0.0;
};

struct CalibrationResult {
  std::vector<CalibrationRow> rows;
  double spearman = 0.0;
  double pearson = 0.0;
};

std::vector<double> default_noise_grid();
// Parses "a:b:step" into an inclusive grid.
std::vector<double> parse_grid(std::string_view spec);

// Noisy-expert rollouts per noise level, scored against `experts`. Every
// level reuses the same reset seeds.
CalibrationResult calibrate(const CalibrationConfig& cfg, const ExpertDataset& experts);

// ---------------------------------------------------------------------------
// Solver sweep

struct SweepRow {
  std::string solver;
  std::optional<double> lambda;
  double mean_distance = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  // costs[pair][column], columns in row order.
  std::vector<std::vector<double>> costs;
};

// 16 log-spaced values in [0.001, 1].
std::vector<double> default_lambda_grid();

using TrajectoryPair = std::pair<Trajectory, Trajectory>;

// Fixed-horizon point-mass rollout pairs from noisy experts with noise drawn
// uniformly in [0, max_noise].
std::vector<TrajectoryPair> pointmass_pairs(int count, double max_noise, std::uint64_t seed);

// Mean transport cost per pair for Sinkhorn at every lambda, then greedy,
// then exact. `reward` supplies atomization, metric and Sinkhorn budget.
SweepResult solver_sweep(const std::vector<TrajectoryPair>& pairs, const std::vector<double>& lambdas,
                         const RewardConfig& reward);

// ---------------------------------------------------------------------------
// Occupancy-space distances

struct OccupancyRow {
  std::string policy;
  double state = 0.0;
  double state_transition = 0.0;
  std::optional<double> state_action;  // omitted when experts carry no actions
};

// Mean exact (tight Sinkhorn on unequal sizes) distance from `episodes`
// rollouts of `policy` to every expert, in (s), (s,s') and (s,a).
OccupancyRow occupancy_eval(Environment& env, const Policy& policy, const std::string& name,
                            const ExpertDataset& experts, const DistanceMetric& metric, int episodes,
                            std::uint64_t seed);

// Greedy policy from a checkpoint written by `train`.
Policy load_policy(const std::filesystem::path& checkpoint, const Environment& env);
Policy random_policy(const Environment& env, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Ablations

enum class AblationAxis { kOccupancy, kSolver, kLambda, kMetric };

std::string_view to_string(AblationAxis axis);
AblationAxis parse_ablation_axis(std::string_view name);
std::vector<std::string> default_axis_values(AblationAxis axis);

// `base` with one axis set to `value`.
RunConfig with_axis_value(const RunConfig& base, AblationAxis axis, const std::string& value);

struct AblationRow {
  std::string axis;
  std::string value;
  double normalized_return = 0.0;  // mean over seeds
  double percent_diff = 0.0;       // against the base configuration
};

// Trains the base config and every variant on the same seeds.
std::vector<AblationRow> ablation_grid(const RunConfig& base, AblationAxis axis,
                                       const std::vector<std::string>& values,
                                       const std::vector<std::uint64_t>& seeds);

// ---------------------------------------------------------------------------
// CSV output

std::string format_number(double x);

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricRow>& rows);
void write_calibration_csv(const std::filesystem::path& path, const CalibrationResult& result);
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);
void write_occupancy_csv(const std::filesystem::path& path, const std::vector<OccupancyRow>& rows);
void write_ablation_csv(const std::filesystem::path& path, const std::vector<AblationRow>& rows);

}  // namespace oops
