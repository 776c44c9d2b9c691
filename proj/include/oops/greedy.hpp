#pragma once

#include "oops/coupling.hpp"
#include "oops/measure.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <vector>

namespace oops {

// Timestep-ordered nearest-available matching: source atom i (in index
// order) pours a_i into its cheapest targets that still have capacity,
// splitting when a target fills up. Ties go to the lowest target index.
template <typename Scalar>
Coupling<Scalar> greedy_coupling(const Matrix<Scalar>& cost, const Vector<Scalar>& a,
                                 const Vector<Scalar>& b) {
  detail::check_problem(cost, a, b, "greedy_coupling");
  const Eigen::Index n = cost.rows(), m = cost.cols();
  // Capacities below this are treated as exhausted (rounding dust from 1/n sums).
  const Scalar dust = Scalar(1e-15);

  Matrix<Scalar> plan = Matrix<Scalar>::Zero(n, m);
  Vector<Scalar> capacity = b;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index l, Eigen::Index r) { return cost(i, l) < cost(i, r); });
    Scalar remaining = a(i);
    Eigen::Index last = -1;
    for (const Eigen::Index j : order) {
      if (remaining <= Scalar(0)) break;
      if (capacity(j) <= dust) continue;
      const Scalar moved = std::min(remaining, capacity(j));
      plan(i, j) += moved;
      capacity(j) -= moved;
      remaining -= moved;
      last = j;
    }
    // Dust left over from capacity rounding goes to the last target used so
    // the row sums stay exact.
    if (remaining > Scalar(0)) {
      if (last < 0) last = order.front();
      plan(i, last) += remaining;
    }
  }

  Coupling<Scalar> out;
  out.plan = std::move(plan);
  out.row_marginal = a;
  out.col_marginal = b;
  out.solver = SolverTag::kGreedy;
  out.residual = marginal_residual(out.plan, a, b);
  return out;
}

}  // namespace oops
