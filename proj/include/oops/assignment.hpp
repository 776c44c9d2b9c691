#pragma once

#include "oops/coupling.hpp"
#include "oops/errors.hpp"
#include "oops/measure.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace oops {

// Mean matched cost of assigning row i to column perm[i], summed in row order.
template <typename Scalar>
Scalar assignment_value(const Matrix<Scalar>& cost, const std::vector<Eigen::Index>& perm) {
  Scalar total(0);
  for (Eigen::Index i = 0; i < cost.rows(); ++i) total += cost(i, perm[static_cast<std::size_t>(i)]);
  return total / static_cast<Scalar>(cost.rows());
}

// Minimum-cost perfect assignment (Hungarian method with row/column
// potentials, O(n^3)). Returns perm with row i matched to column perm[i].
template <typename Scalar>
std::vector<Eigen::Index> min_cost_assignment(const Matrix<Scalar>& cost) {
  const Eigen::Index n = cost.rows();
  if (cost.cols() != n) throw UnsupportedInstance("assignment: cost matrix must be square");
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  // 1-based internally; column 0 is the virtual start.
  std::vector<Scalar> u(n + 1, Scalar(0)), v(n + 1, Scalar(0)), minv(n + 1);
  std::vector<Eigen::Index> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (Eigen::Index i = 1; i <= n; ++i) {
    match[0] = i;
    Eigen::Index j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const Eigen::Index i0 = match[j0];
      Scalar delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const Scalar reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index j = 1; j <= n; ++j) perm[static_cast<std::size_t>(match[j] - 1)] = j - 1;
  return perm;
}

template <typename Scalar>
struct ExactResult {
  Coupling<Scalar> coupling;
  Scalar value;
  std::vector<Eigen::Index> permutation;
};

// Exact optimal transport for two equal-size uniform measures. With equal
// uniform marginals an optimal vertex of the transport polytope is a scaled
// permutation, so this reduces to an assignment problem; value is the mean
// matched cost. Other instances throw UnsupportedInstance.
template <typename Scalar>
ExactResult<Scalar> exact_w1(const Matrix<Scalar>& cost, const Vector<Scalar>& a,
                             const Vector<Scalar>& b) {
  detail::check_problem(cost, a, b, "exact_w1");
  const Eigen::Index n = cost.rows();
  if (cost.cols() != n)
    throw UnsupportedInstance("exact_w1: sizes differ (" + std::to_string(n) + " vs " +
                              std::to_string(cost.cols()) + ")");
  const double u = 1.0 / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(static_cast<double>(a(i)) - u) > 1e-12 || std::abs(static_cast<double>(b(i)) - u) > 1e-12)
      throw UnsupportedInstance("exact_w1: marginals must be uniform");
  }

  ExactResult<Scalar> out;
  out.permutation = min_cost_assignment(cost);
  out.value = assignment_value(cost, out.permutation);
  out.coupling.plan = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) out.coupling.plan(i, out.permutation[static_cast<std::size_t>(i)]) = a(i);
  out.coupling.row_marginal = a;
  out.coupling.col_marginal = b;
  out.coupling.solver = SolverTag::kExact;
  out.coupling.residual = marginal_residual(out.coupling.plan, a, b);
  return out;
}

inline constexpr Eigen::Index kBruteForceMaxSize = 8;

// Test oracle: minimum over all n! permutations of the mean matched cost.
template <typename Scalar>
Scalar brute_force_w1(const Matrix<Scalar>& cost) {
  const Eigen::Index n = cost.rows();
  if (cost.cols() != n) throw SizeError("brute_force_w1: cost matrix must be square");
  if (n < 1 || n > kBruteForceMaxSize)
    throw SizeError("brute_force_w1: size must be in [1, 8], got " + std::to_string(n));
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Scalar best = std::numeric_limits<Scalar>::infinity();
  do {
    best = std::min(best, assignment_value(cost, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace oops
