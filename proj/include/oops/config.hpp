#pragma once

#include "oops/actor_critic.hpp"
#include "oops/reward.hpp"
#include "oops/tabular_q.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oops {

enum class RewardSource { kOops, kTrue };

std::string_view to_string(RewardSource source);
RewardSource parse_reward_source(std::string_view name);

struct RunConfig {
  std::string env = "gridworld";
  // JSON-lines expert file. Empty: clean scripted demonstrations are
  // generated in memory from the run seed.
  std::string experts;
  int n_experts = 1;
  // `true` trains on the environment reward (oracle runs).
  RewardSource reward_source = RewardSource::kOops;
  RewardConfig reward;
  TabularQConfig tabular_q;
  ActorCriticConfig actor_critic;
  long total_steps = 200000;
  long eval_interval = 10000;
  int eval_episodes = 10;
  std::uint64_t seed = 0;
  std::size_t buffer_capacity = 1'000'000;
  // Off by default so metrics files stay byte-identical across runs.
  bool record_wall_clock = false;
  bool save_checkpoints = true;

  // Throws ConfigError on bad values, DataError when `experts` is missing.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& cfg);
// Strict: unknown keys and mistyped values throw ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);

// Recursively overlays `patch` onto `base`. Every key of `patch` must already
// exist in `base` with a compatible type.
void merge_strict(nlohmann::json& base, const nlohmann::json& patch, const std::string& where = "");

// Applies "a.b.c=value". The value is read as JSON when it parses, else as a
// plain string.
void apply_override(nlohmann::json& j, std::string_view assignment);

// defaults < file < overrides.
RunConfig load_run_config(const std::optional<std::filesystem::path>& file,
                          const std::vector<std::string>& overrides);

}  // namespace oops
