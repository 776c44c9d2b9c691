#include "oops/trajectory.hpp"

#include "oops/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace oops {

using nlohmann::json;

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, const char* field) {
  if (!rows.is_array() || rows.empty())
    throw DataError(std::string("trajectory: `") + field + "` must be a non-empty array");
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const json& row = rows[i];
    if (!row.is_array() || row.size() != cols)
      throw DataError(std::string("trajectory: ragged `") + field + "` array");
    for (std::size_t j = 0; j < cols; ++j) {
      if (!row[j].is_number()) throw DataError(std::string("trajectory: non-numeric `") + field + "` entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  return m;
}

}  // namespace

void Trajectory::validate() const {
  if (states.rows() < 1 || states.cols() < 1) throw InputError("trajectory: no states");
  if (!states.allFinite()) throw InputError("trajectory: non-finite state entry");
  if (actions) {
    if (actions->rows() != states.rows() - 1)
      throw InputError("trajectory: expected " + std::to_string(states.rows() - 1) + " actions, got " +
                       std::to_string(actions->rows()));
    if (!actions->allFinite()) throw InputError("trajectory: non-finite action entry");
  }
}

Trajectory make_trajectory(const std::vector<StateVector>& states,
                           const std::vector<Eigen::VectorXd>* actions, std::int64_t id) {
  Trajectory traj;
  traj.id = id;
  if (states.empty()) throw InputError("trajectory: no states");
  const Eigen::Index d = states.front().size();
  traj.states.resize(static_cast<Eigen::Index>(states.size()), d);
  for (std::size_t t = 0; t < states.size(); ++t) {
    if (states[t].size() != d) throw DimensionError("trajectory: state dimensions differ");
    traj.states.row(static_cast<Eigen::Index>(t)) = states[t].transpose();
  }
  if (actions && !actions->empty()) {
    const Eigen::Index k = actions->front().size();
    Eigen::MatrixXd acts(static_cast<Eigen::Index>(actions->size()), k);
    for (std::size_t t = 0; t < actions->size(); ++t) {
      if ((*actions)[t].size() != k) throw DimensionError("trajectory: action dimensions differ");
      acts.row(static_cast<Eigen::Index>(t)) = (*actions)[t].transpose();
    }
    traj.actions = std::move(acts);
  }
  traj.validate();
  return traj;
}

std::string to_json_line(const Trajectory& traj) {
  json j;
  j["id"] = traj.id;
  j["states"] = matrix_to_json(traj.states);
  if (traj.actions) j["actions"] = matrix_to_json(*traj.actions);
  if (traj.true_return) j["true_return"] = *traj.true_return;
  return j.dump();
}

Trajectory from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("trajectory: bad JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("id") || !j.contains("states"))
    throw DataError("trajectory: line needs `id` and `states`");
  Trajectory traj;
  if (!j["id"].is_number_integer()) throw DataError("trajectory: `id` must be an integer");
  traj.id = j["id"].get<std::int64_t>();
  traj.states = matrix_from_json(j["states"], "states");
  if (j.contains("actions")) {
    // A single-state episode has an empty action list.
    if (j["actions"].is_array() && j["actions"].empty())
      traj.actions = Eigen::MatrixXd(0, 0);
    else
      traj.actions = matrix_from_json(j["actions"], "actions");
  }
  if (j.contains("true_return")) {
    if (!j["true_return"].is_number()) throw DataError("trajectory: `true_return` must be a number");
    traj.true_return = j["true_return"].get<double>();
  }
  try {
    traj.validate();
  } catch (const InputError& e) {
    throw DataError(e.what());
  }
  return traj;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Trajectory>& trajs) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  for (const Trajectory& t : trajs) out << to_json_line(t) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<Trajectory> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open trajectory file " + path.string());
  std::vector<Trajectory> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(from_json_line(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace oops
