#include "oops/config.hpp"

#include "oops/errors.hpp"

#include <algorithm>
#include <fstream>

namespace oops {

using nlohmann::json;

std::string_view to_string(RewardSource source) { return source == RewardSource::kOops ? "oops" : "true"; }

RewardSource parse_reward_source(std::string_view name) {
  if (name == "oops") return RewardSource::kOops;
  if (name == "true") return RewardSource::kTrue;
  throw ConfigError("unknown reward_source `" + std::string(name) + "` (expected oops or true)");
}

void RunConfig::validate() const {
  if (env != "pointmass" && env != "gridworld") throw ConfigError("unknown env `" + env + "`");
  if (n_experts < 1) throw ConfigError("n_experts must be >= 1");
  if (total_steps < 0) throw ConfigError("total_steps must be >= 0");
  if (eval_interval < 1) throw ConfigError("eval_interval must be >= 1");
  if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  if (buffer_capacity < 1) throw ConfigError("buffer_capacity must be >= 1");
  reward.validate();
  tabular_q.validate();
  actor_critic.validate();
  if (!experts.empty() && !std::filesystem::exists(experts))
    throw DataError("expert file not found: " + experts);
}

json to_json(const RunConfig& c) {
  const SinkhornConfig& sk = c.reward.solver.sinkhorn;
  const TabularQConfig& q = c.tabular_q;
  const ActorCriticConfig& ac = c.actor_critic;
  return json{
      {"env", c.env},
      {"experts", c.experts},
      {"n_experts", c.n_experts},
      {"reward_source", std::string(to_string(c.reward_source))},
      {"total_steps", c.total_steps},
      {"eval_interval", c.eval_interval},
      {"eval_episodes", c.eval_episodes},
      {"seed", c.seed},
      {"buffer_capacity", c.buffer_capacity},
      {"record_wall_clock", c.record_wall_clock},
      {"save_checkpoints", c.save_checkpoints},
      {"reward",
       {{"mode", std::string(to_string(c.reward.mode))},
        {"metric", c.reward.metric.name()},
        {"solver", std::string(to_string(c.reward.solver.kind))},
        {"lambda", sk.lambda},
        {"max_iterations", sk.max_iterations},
        {"tolerance", sk.marginal_tolerance},
        {"selection", std::string(to_string(c.reward.selection))},
        {"scale", c.reward.reward_scale}}},
      {"tabular_q",
       {{"alpha", q.alpha},
        {"gamma", q.gamma},
        {"epsilon_start", q.epsilon_start},
        {"epsilon_end", q.epsilon_end},
        {"epsilon_decay_fraction", q.epsilon_decay_fraction},
        {"updates_per_step", q.updates_per_step},
        {"batch_size", q.batch_size}}},
      {"actor_critic",
       {{"actor_hidden", ac.actor_hidden},
        {"critic_hidden", ac.critic_hidden},
        {"tau", ac.tau},
        {"exploration_noise", ac.exploration_noise},
        {"actor_lr", ac.actor_lr},
        {"critic_lr", ac.critic_lr},
        {"adam_beta1", ac.adam_beta1},
        {"adam_beta2", ac.adam_beta2},
        {"adam_epsilon", ac.adam_epsilon},
        {"batch_size", ac.batch_size},
        {"gamma", ac.gamma},
        {"warmup_steps", ac.warmup_steps},
        {"updates_per_step", ac.updates_per_step}}},
  };
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key `" + where + key + "` has the wrong type");
  }
}

bool compatible(const json& base, const json& value) {
  if (base.is_number_integer()) {
    if (value.is_number_integer()) return !(base.is_number_unsigned() && value.get<std::int64_t>() < 0);
    return value.is_number_float() && value.get<double>() == std::floor(value.get<double>()) &&
           !(base.is_number_unsigned() && value.get<double>() < 0.0);
  }
  if (base.is_number_float()) return value.is_number();
  return base.type() == value.type();
}

}  // namespace

void merge_strict(json& base, const json& patch, const std::string& where) {
  if (!patch.is_object()) throw ConfigError("config " + (where.empty() ? "root" : "`" + where + "`") + " must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key `" + key + "`");
    json& slot = base[it.key()];
    if (slot.is_object()) {
      merge_strict(slot, it.value(), key);
    } else if (!compatible(slot, it.value())) {
      throw ConfigError("config key `" + key + "` has the wrong type");
    } else if (slot.is_number_integer() && it.value().is_number_float()) {
      slot = static_cast<std::int64_t>(it.value().get<double>());
    } else {
      slot = it.value();
    }
  }
}

void apply_override(json& j, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("override `" + std::string(assignment) + "` is not key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  const json::json_pointer pointer("/" + [&] {
    std::string p = key;
    std::replace(p.begin(), p.end(), '.', '/');
    return p;
  }());
  if (j.contains(pointer) && j.at(pointer).is_string() && !value.is_string()) value = text;

  json patch = std::move(value);
  std::size_t end = key.size();
  while (true) {
    const std::size_t dot = key.rfind('.', end - 1);
    const std::size_t begin = dot == std::string::npos ? 0 : dot + 1;
    const std::string part = key.substr(begin, end - begin);
    if (part.empty()) throw ConfigError("override key `" + key + "` is malformed");
    patch = json{{part, std::move(patch)}};
    if (dot == std::string::npos) break;
    end = dot;
  }
  merge_strict(j, patch);
}

RunConfig run_config_from_json(const json& input) {
  json j = to_json(RunConfig{});
  merge_strict(j, input);

  RunConfig c;
  std::string source, mode, metric, solver, selection;
  read(j, "env", c.env, "");
  read(j, "experts", c.experts, "");
  read(j, "n_experts", c.n_experts, "");
  read(j, "reward_source", source, "");
  read(j, "total_steps", c.total_steps, "");
  read(j, "eval_interval", c.eval_interval, "");
  read(j, "eval_episodes", c.eval_episodes, "");
  read(j, "seed", c.seed, "");
  read(j, "buffer_capacity", c.buffer_capacity, "");
  read(j, "record_wall_clock", c.record_wall_clock, "");
  read(j, "save_checkpoints", c.save_checkpoints, "");
  c.reward_source = parse_reward_source(source);

  const json& r = j.at("reward");
  read(r, "mode", mode, "reward.");
  read(r, "metric", metric, "reward.");
  read(r, "solver", solver, "reward.");
  read(r, "lambda", c.reward.solver.sinkhorn.lambda, "reward.");
  read(r, "max_iterations", c.reward.solver.sinkhorn.max_iterations, "reward.");
  read(r, "tolerance", c.reward.solver.sinkhorn.marginal_tolerance, "reward.");
  read(r, "selection", selection, "reward.");
  read(r, "scale", c.reward.reward_scale, "reward.");
  try {
    c.reward.mode = parse_atomization(mode);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  c.reward.metric = DistanceMetric::parse(metric);
  c.reward.solver.kind = parse_solver(solver);
  c.reward.selection = parse_expert_selection(selection);

  const json& q = j.at("tabular_q");
  read(q, "alpha", c.tabular_q.alpha, "tabular_q.");
  read(q, "gamma", c.tabular_q.gamma, "tabular_q.");
  read(q, "epsilon_start", c.tabular_q.epsilon_start, "tabular_q.");
  read(q, "epsilon_end", c.tabular_q.epsilon_end, "tabular_q.");
  read(q, "epsilon_decay_fraction", c.tabular_q.epsilon_decay_fraction, "tabular_q.");
  read(q, "updates_per_step", c.tabular_q.updates_per_step, "tabular_q.");
  read(q, "batch_size", c.tabular_q.batch_size, "tabular_q.");

  const json& a = j.at("actor_critic");
  ActorCriticConfig& ac = c.actor_critic;
  read(a, "actor_hidden", ac.actor_hidden, "actor_critic.");
  read(a, "critic_hidden", ac.critic_hidden, "actor_critic.");
  read(a, "tau", ac.tau, "actor_critic.");
  read(a, "exploration_noise", ac.exploration_noise, "actor_critic.");
  read(a, "actor_lr", ac.actor_lr, "actor_critic.");
  read(a, "critic_lr", ac.critic_lr, "actor_critic.");
  read(a, "adam_beta1", ac.adam_beta1, "actor_critic.");
  read(a, "adam_beta2", ac.adam_beta2, "actor_critic.");
  read(a, "adam_epsilon", ac.adam_epsilon, "actor_critic.");
  read(a, "batch_size", ac.batch_size, "actor_critic.");
  read(a, "gamma", ac.gamma, "actor_critic.");
  read(a, "warmup_steps", ac.warmup_steps, "actor_critic.");
  read(a, "updates_per_step", ac.updates_per_step, "actor_critic.");
  return c;
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& file,
                          const std::vector<std::string>& overrides) {
  json j = to_json(RunConfig{});
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("cannot open config file " + file->string());
    json parsed = json::parse(in, nullptr, false);
    if (parsed.is_discarded()) throw ConfigError("config file " + file->string() + " is not valid JSON");
    merge_strict(j, parsed);
  }
  for (const std::string& o : overrides) apply_override(j, o);
  return run_config_from_json(j);
}

}  // namespace oops
