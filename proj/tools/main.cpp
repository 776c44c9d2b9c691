#include "plot.hpp"

#include "oops/config.hpp"
#include "oops/errors.hpp"
#include "oops/expert.hpp"
#include "oops/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace oops;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kData = 3, kDiverged = 4 };

struct ConfigFlags {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> env;
  std::optional<std::string> experts;
  std::optional<int> n_experts;
  std::optional<long> steps;

  void attach(CLI::App* app, bool run_flags) {
    app->add_option("--config", config, "JSON config file");
    app->add_option("--set", sets, "Override a config key, key=value (repeatable)");
    app->add_option("--seed", seed, "Master seed");
    app->add_option("--env", env, "pointmass or gridworld");
    app->add_option("--experts", experts, "Expert trajectories (JSON lines)");
    app->add_option("--n-experts", n_experts, "Number of expert trajectories to use");
    if (run_flags) app->add_option("--steps", steps, "Environment step budget");
  }

  // defaults < file < --set < dedicated flags
  RunConfig load() const {
    std::vector<std::string> overrides = sets;
    if (seed) overrides.push_back("seed=" + std::to_string(*seed));
    if (env) overrides.push_back("env=\"" + *env + "\"");
    if (experts) overrides.push_back("experts=" + nlohmann::json(*experts).dump());
    if (n_experts) overrides.push_back("n_experts=" + std::to_string(*n_experts));
    if (steps) overrides.push_back("total_steps=" + std::to_string(*steps));
    std::optional<fs::path> file;
    if (!config.empty()) file = config;
    return load_run_config(file, overrides);
  }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

double to_double(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0') throw ConfigError("`" + text + "` is not a number");
  return v;
}

std::vector<double> parse_number_list(const std::string& text) {
  if (text.find(':') != std::string::npos) return parse_grid(text);
  std::vector<double> out;
  for (const std::string& item : split_list(text)) out.push_back(to_double(item));
  if (out.empty()) throw ConfigError("empty value list");
  return out;
}

// Experts for analysis commands: the configured file, or `fallback_count`
// clean demonstrations when none is given.
ExpertDataset analysis_experts(const RunConfig& cfg, const ConfigFlags& flags, int fallback_count) {
  RunConfig c = cfg;
  if (!flags.n_experts) c.n_experts = fallback_count;
  if (!c.experts.empty()) return load_experts(c);
  return generate_experts(c.env, c.n_experts, 0.0, c.seed);
}

int run_train(const ConfigFlags& flags, const std::string& out) {
  const RunConfig cfg = flags.load();
  const TrainResult r = train(cfg, fs::path(out));
  std::cout << "run directory: " << r.run_dir.string() << '\n';
  if (!r.rows.empty()) {
    const MetricRow& last = r.rows.back();
    std::cout << "final step " << last.step << ": true return " << format_number(last.true_return_mean)
              << " (expert " << format_number(r.expert_return) << ", normalized "
              << format_number(r.final_normalized()) << "), proxy return " << format_number(last.proxy_return_mean)
              << '\n';
  }
  if (r.failed) {
    std::cerr << "error: run diverged: " << r.failure << '\n';
    return kDiverged;
  }
  return kOk;
}

int run_generate(const std::string& env, int count, double noise, std::uint64_t seed, const std::string& out) {
  const ExpertDataset data = generate_experts(env, count, noise, seed);
  write_jsonl(out, data.trajectories);
  double total = 0.0;
  for (const Trajectory& t : data.trajectories) total += *t.true_return;
  std::cout << "wrote " << count << " trajectories to " << out << " (mean true return "
            << format_number(total / count) << ")\n";
  return kOk;
}

int run_calibrate(const ConfigFlags& flags, const std::string& grid, int episodes, const std::string& out) {
  RunConfig cfg = flags.load();
  CalibrationConfig cal;
  cal.env = cfg.env;
  cal.reward = cfg.reward;
  cal.seed = cfg.seed;
  cal.episodes_per_level = episodes;
  if (!grid.empty()) cal.noise_grid = parse_number_list(grid);
  const CalibrationResult r = calibrate(cal, analysis_experts(cfg, flags, 10));
  write_calibration_csv(fs::path(out) / "calibration.csv", r);
  std::cout << "spearman " << format_number(r.spearman) << ", pearson " << format_number(r.pearson) << '\n';
  return kOk;
}

int run_sweep(const ConfigFlags& flags, const std::string& grid, int pairs, double max_noise, const std::string& out) {
  const RunConfig cfg = flags.load();
  if (flags.env && *flags.env != "pointmass") throw ConfigError("solver-sweep draws point-mass rollout pairs only");
  if (pairs < 1) throw ConfigError("--pairs must be >= 1");
  const std::vector<double> lambdas = grid.empty() ? default_lambda_grid() : parse_number_list(grid);
  const SweepResult r = solver_sweep(pointmass_pairs(pairs, max_noise, cfg.seed), lambdas, cfg.reward);
  write_sweep_csv(fs::path(out) / "sweep.csv", r);
  for (const SweepRow& row : r.rows)
    std::cout << row.solver << (row.lambda ? " " + format_number(*row.lambda) : "") << ": "
              << format_number(row.mean_distance) << '\n';
  return kOk;
}

int run_occupancy(const ConfigFlags& flags, const std::vector<std::string>& checkpoints, bool with_expert,
                  bool with_random, int episodes, const std::string& out) {
  const RunConfig cfg = flags.load();
  const ExpertDataset experts = analysis_experts(cfg, flags, 10);
  auto env = make_env(cfg.env);
  std::vector<OccupancyRow> rows;
  const auto eval = [&](const Policy& policy, const std::string& name) {
    rows.push_back(occupancy_eval(*env, policy, name, experts, cfg.reward.metric, episodes, cfg.seed));
    if (!rows.back().state_action) std::cerr << "warning: experts carry no actions; state_action column omitted\n";
  };
  if (with_expert)
    eval(make_expert_policy(*env, default_expert_spec(*env), derive_seed(cfg.seed, streams::kNoise)), "expert");
  if (with_random) eval(random_policy(*env, derive_seed(cfg.seed, streams::kNoise)), "random");
  for (const std::string& ckpt : checkpoints) eval(load_policy(ckpt, *env), ckpt);
  if (rows.empty()) throw ConfigError("nothing to evaluate: pass --checkpoint, --expert or --random");
  write_occupancy_csv(fs::path(out) / "occupancy.csv", rows);
  for (const OccupancyRow& r : rows)
    std::cout << r.policy << ": s " << format_number(r.state) << ", ss " << format_number(r.state_transition)
              << ", sa " << (r.state_action ? format_number(*r.state_action) : "-") << '\n';
  return kOk;
}

int run_ablate(const ConfigFlags& flags, const std::string& axis_name, const std::string& values,
               const std::string& seeds, const std::string& out) {
  const RunConfig cfg = flags.load();
  const AblationAxis axis = parse_ablation_axis(axis_name);
  const std::vector<std::string> vals = values.empty() ? default_axis_values(axis) : split_list(values);
  std::vector<std::uint64_t> seed_list;
  for (const std::string& s : split_list(seeds)) seed_list.push_back(static_cast<std::uint64_t>(to_double(s)));
  if (seed_list.empty()) seed_list.push_back(cfg.seed);
  const std::vector<AblationRow> rows = ablation_grid(cfg, axis, vals, seed_list);
  write_ablation_csv(fs::path(out) / "ablation.csv", rows);
  for (const AblationRow& r : rows)
    std::cout << r.axis << '=' << r.value << ": normalized " << format_number(r.normalized_return) << " ("
              << format_number(r.percent_diff) << "%)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imitation from observation with optimal-transport proxy rewards"};
  app.require_subcommand(1);

  std::string out = ".";

  std::string gen_env = "gridworld", gen_out;
  int gen_count = 10;
  double gen_noise = 0.0;
  std::uint64_t gen_seed = 0;
  CLI::App* gen = app.add_subcommand("generate-expert", "Write scripted expert trajectories as JSON lines");
  gen->add_option("--env", gen_env, "pointmass or gridworld");
  gen->add_option("--count", gen_count, "Number of trajectories");
  gen->add_option("--noise", gen_noise, "Expert noise level");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--out", gen_out, "Output file")->required();

  ConfigFlags train_flags;
  std::string train_out = "runs";
  CLI::App* train_cmd = app.add_subcommand("train", "Train an agent on proxy rewards");
  train_flags.attach(train_cmd, true);
  train_cmd->add_option("--out", train_out, "Root directory for run directories");

  ConfigFlags cal_flags;
  std::string noise_grid;
  int cal_episodes = 5;
  CLI::App* cal = app.add_subcommand("calibrate", "Proxy vs true return of noisy experts");
  cal_flags.attach(cal, false);
  cal->add_option("--noise-grid", noise_grid, "Noise levels, a:b:step or a comma list");
  cal->add_option("--episodes", cal_episodes, "Episodes per noise level");
  cal->add_option("--out", out, "Output directory");

  ConfigFlags sweep_flags;
  std::string lambda_grid;
  int sweep_pairs = 100;
  double sweep_noise = 1.5;
  CLI::App* sweep = app.add_subcommand("solver-sweep", "Transport cost per coupling solver");
  sweep_flags.attach(sweep, false);
  sweep->add_option("--lambda-grid", lambda_grid, "Sinkhorn lambdas, a comma list or a:b:step");
  sweep->add_option("--pairs", sweep_pairs, "Number of rollout pairs");
  sweep->add_option("--max-noise", sweep_noise, "Largest expert noise level for the rollouts");
  sweep->add_option("--out", out, "Output directory");

  ConfigFlags occ_flags;
  std::vector<std::string> checkpoints;
  bool occ_expert = false, occ_random = false;
  int occ_episodes = 10;
  CLI::App* occ = app.add_subcommand("occupancy-eval", "Distances to experts in (s), (s,s') and (s,a)");
  occ_flags.attach(occ, false);
  occ->add_option("--checkpoint", checkpoints, "Policy checkpoint (repeatable)");
  occ->add_flag("--expert", occ_expert, "Include the scripted expert");
  occ->add_flag("--random", occ_random, "Include a uniform random policy");
  occ->add_option("--episodes", occ_episodes, "Evaluation episodes per policy");
  occ->add_option("--out", out, "Output directory");

  ConfigFlags abl_flags;
  std::string axis, values, seeds;
  CLI::App* abl = app.add_subcommand("ablate", "Final normalized return across one config axis");
  abl_flags.attach(abl, true);
  abl->add_option("--axis", axis, "occupancy, solver, lambda or metric")->required();
  abl->add_option("--values", values, "Comma-separated axis values");
  abl->add_option("--seeds", seeds, "Comma-separated seeds shared by every value");
  abl->add_option("--out", out, "Output directory");

  std::vector<std::string> plot_inputs;
  CLI::App* plot_cmd = app.add_subcommand("plot", "Render metrics, calibration or sweep CSVs as SVG");
  plot_cmd->add_option("files", plot_inputs, "CSV files")->required();
  plot_cmd->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (gen->parsed()) return run_generate(gen_env, gen_count, gen_noise, gen_seed, gen_out);
    if (train_cmd->parsed()) return run_train(train_flags, train_out);
    if (cal->parsed()) return run_calibrate(cal_flags, noise_grid, cal_episodes, out);
    if (sweep->parsed()) return run_sweep(sweep_flags, lambda_grid, sweep_pairs, sweep_noise, out);
    if (occ->parsed()) return run_occupancy(occ_flags, checkpoints, occ_expert, occ_random, occ_episodes, out);
    if (abl->parsed()) return run_ablate(abl_flags, axis, values, seeds, out);
    if (plot_cmd->parsed()) {
      for (const fs::path& p : plot::plot_files({plot_inputs.begin(), plot_inputs.end()}, out))
        std::cout << "wrote " << p.string() << '\n';
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const DivergenceError& e) {
    std::cerr << "run diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
