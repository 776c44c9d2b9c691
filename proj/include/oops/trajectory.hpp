#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace oops {

using StateVector = Eigen::VectorXd;

// One episode. Row t of `states` is s_t, so a horizon-T episode has T+1 rows.
// Row t of `actions` (when present) is the action taken in s_t.
struct Trajectory {
  Eigen::MatrixXd states;
  std::optional<Eigen::MatrixXd> actions;
  std::int64_t id = 0;
  std::optional<double> true_return;

  Eigen::Index num_states() const { return states.rows(); }
  Eigen::Index num_transitions() const { return states.rows() - 1; }
  Eigen::Index state_dim() const { return states.cols(); }
  bool has_actions() const { return actions.has_value(); }

  // Throws InputError on empty/non-finite data or an actions/states length mismatch.
  void validate() const;
};

// Builds a trajectory from a list of state vectors (and optional actions).
Trajectory make_trajectory(const std::vector<StateVector>& states,
                           const std::vector<Eigen::VectorXd>* actions = nullptr,
                           std::int64_t id = 0);

// JSON-lines serialization: one object per line with `id`, `states`,
// optional `actions` and optional `true_return`.
std::string to_json_line(const Trajectory& traj);
Trajectory from_json_line(const std::string& line);

void write_jsonl(const std::filesystem::path& path, const std::vector<Trajectory>& trajs);
// Throws DataError when the file is missing or a line does not parse.
std::vector<Trajectory> read_jsonl(const std::filesystem::path& path);

}  // namespace oops
