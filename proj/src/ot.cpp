#include "oops/assignment.hpp"
#include "oops/coupling.hpp"
#include "oops/distance.hpp"
#include "oops/greedy.hpp"
#include "oops/measure.hpp"
#include "oops/metric.hpp"
#include "oops/sinkhorn.hpp"

#include <cmath>

namespace oops {

std::string_view to_string(Atomization mode) {
  switch (mode) {
    case Atomization::kState: return "s";
    case Atomization::kStateTransition: return "ss";
    case Atomization::kStateAction: return "sa";
  }
  return "?";
}

Atomization parse_atomization(std::string_view name) {
  if (name == "s" || name == "state") return Atomization::kState;
  if (name == "ss" || name == "state-transition" || name == "(s,s')") return Atomization::kStateTransition;
  if (name == "sa" || name == "state-action" || name == "(s,a)") return Atomization::kStateAction;
  throw ConfigError("unknown atomization `" + std::string(name) + "` (expected s, ss or sa)");
}

std::string_view to_string(SolverTag tag) {
  switch (tag) {
    case SolverTag::kSinkhorn: return "sinkhorn";
    case SolverTag::kGreedy: return "greedy";
    case SolverTag::kExact: return "exact";
    case SolverTag::kOracle: return "oracle";
  }
  return "?";
}

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kSinkhorn: return "sinkhorn";
    case SolverKind::kGreedy: return "greedy";
    case SolverKind::kExact: return "exact";
  }
  return "?";
}

SolverKind parse_solver(std::string_view name) {
  if (name == "sinkhorn") return SolverKind::kSinkhorn;
  if (name == "greedy") return SolverKind::kGreedy;
  if (name == "exact") return SolverKind::kExact;
  throw ConfigError("unknown solver `" + std::string(name) + "` (expected sinkhorn, greedy or exact)");
}

void DistanceMetric::validate() const {
  if (order != 1 && order != 2) throw ConfigError("distance metric: order must be 1 or 2");
  if (order == 2 && base != BaseDistance::kEuclidean)
    throw ConfigError("distance metric: order 2 is only supported with the euclidean base");
}

std::string DistanceMetric::name() const {
  switch (base) {
    case BaseDistance::kEuclidean: return order == 2 ? "euclidean-w2" : "euclidean";
    case BaseDistance::kSqrtEuclidean: return "sqrt-euclidean";
    case BaseDistance::kCosine: return "cosine";
  }
  return "?";
}

DistanceMetric DistanceMetric::parse(std::string_view name) {
  if (name == "euclidean") return {BaseDistance::kEuclidean, 1};
  if (name == "euclidean-w2") return {BaseDistance::kEuclidean, 2};
  if (name == "sqrt-euclidean") return {BaseDistance::kSqrtEuclidean, 1};
  if (name == "cosine") return {BaseDistance::kCosine, 1};
  throw ConfigError("unknown distance metric `" + std::string(name) +
                    "` (expected euclidean, euclidean-w2, sqrt-euclidean or cosine)");
}

Coupling<double> solve_coupling(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                                const Eigen::VectorXd& b, const SolverChoice& solver) {
  switch (solver.kind) {
    case SolverKind::kSinkhorn:
      return sinkhorn(cost, a, b, solver.sinkhorn);
    case SolverKind::kGreedy:
      return greedy_coupling(cost, a, b);
    case SolverKind::kExact:
      try {
        return exact_w1(cost, a, b).coupling;
      } catch (const UnsupportedInstance&) {
        SinkhornConfig tight = solver.sinkhorn;
        tight.lambda = kExactFallbackLambda;
        return sinkhorn(cost, a, b, tight);
      }
  }
  throw ConfigError("unknown solver");
}

TrajectoryDistance trajectory_distance(const Trajectory& learner, const Trajectory& expert,
                                       Atomization mode, const DistanceMetric& metric,
                                       const SolverChoice& solver) {
  const DiscreteMeasure<double> mu = atomize(learner, mode);
  const DiscreteMeasure<double> nu = atomize(expert, mode);
  TrajectoryDistance out;
  out.cost = cost_matrix(mu, nu, metric);
  out.coupling = solve_coupling(out.cost, mu.weights, nu.weights, solver);
  out.cost_objective = transport_cost(out.cost, out.coupling);
  out.value = metric.order == 2 ? std::sqrt(out.cost_objective) : out.cost_objective;
  return out;
}

}  // namespace oops
