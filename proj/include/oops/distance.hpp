#pragma once

#include "oops/coupling.hpp"
#include "oops/measure.hpp"
#include "oops/metric.hpp"
#include "oops/sinkhorn.hpp"
#include "oops/trajectory.hpp"

#include <string>
#include <string_view>

namespace oops {

enum class SolverKind { kSinkhorn, kGreedy, kExact };

std::string_view to_string(SolverKind kind);
SolverKind parse_solver(std::string_view name);

struct SolverChoice {
  SolverKind kind = SolverKind::kSinkhorn;
  SinkhornConfig sinkhorn;
};

// Regularization used when the exact solver is asked for an instance it
// cannot handle (unequal sizes).
inline constexpr double kExactFallbackLambda = 1e-3;

// Runs the chosen solver on a prepared problem. The exact solver falls back
// to Sinkhorn with kExactFallbackLambda on unsupported instances; the
// coupling's solver tag records what actually ran.
Coupling<double> solve_coupling(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                                const Eigen::VectorXd& b, const SolverChoice& solver);

struct TrajectoryDistance {
  // W_p estimate: the transport cost for p = 1, its square root for p = 2.
  double value = 0.0;
  // <C, P>, the transport cost itself.
  double cost_objective = 0.0;
  Eigen::MatrixXd cost;
  Coupling<double> coupling;
};

// atomize -> cost_matrix -> solver -> transport_cost.
TrajectoryDistance trajectory_distance(const Trajectory& learner, const Trajectory& expert,
                                       Atomization mode, const DistanceMetric& metric,
                                       const SolverChoice& solver);

}  // namespace oops
