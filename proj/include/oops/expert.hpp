#pragma once

#include "oops/env.hpp"
#include "oops/gridworld.hpp"
#include "oops/pointmass.hpp"
#include "oops/trajectory.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace oops {

enum class ExpertKind { kPdController, kShortestPath };

struct ExpertPolicySpec {
  ExpertKind kind = ExpertKind::kPdController;
  // Point-mass: std of Gaussian action noise. Gridworld: probability
  // min(noise_std, 1) of replacing the action by a uniform random one.
  double noise_std = 0.0;
};

inline constexpr double kPdGainP = 1.0;
inline constexpr double kPdGainD = 0.8;

// Scripted expert for `env`, with its own noise stream seeded from `seed`.
Policy make_expert_policy(const Environment& env, const ExpertPolicySpec& spec, std::uint64_t seed);

// The expert kind that matches an environment.
ExpertPolicySpec default_expert_spec(const Environment& env, double noise_std = 0.0);

// One expert episode from reset(seed), with actions and true return recorded.
Trajectory expert_rollout(Environment& env, const ExpertPolicySpec& spec, std::uint64_t seed,
                          std::int64_t id = 0);

// "pointmass" or "gridworld" with default settings; throws ConfigError otherwise.
std::unique_ptr<Environment> make_env(std::string_view env_id);

}  // namespace oops
