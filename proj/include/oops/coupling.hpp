#pragma once

#include "oops/errors.hpp"
#include "oops/measure.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <string_view>

namespace oops {

enum class SolverTag { kSinkhorn, kGreedy, kExact, kOracle };

std::string_view to_string(SolverTag tag);

// A transport plan together with the marginals it was solved for.
template <typename Scalar>
struct Coupling {
  Matrix<Scalar> plan;
  Vector<Scalar> row_marginal;
  Vector<Scalar> col_marginal;
  SolverTag solver = SolverTag::kSinkhorn;
  // Largest absolute marginal violation of `plan`.
  Scalar residual = Scalar(0);
  int iterations = 0;
  bool converged = true;

  Eigen::Index rows() const { return plan.rows(); }
  Eigen::Index cols() const { return plan.cols(); }
};

// L-infinity violation of both marginal constraints.
template <typename Scalar>
Scalar marginal_residual(const Matrix<Scalar>& plan, const Vector<Scalar>& a,
                         const Vector<Scalar>& b) {
  const Scalar row = (plan.rowwise().sum() - a).cwiseAbs().maxCoeff();
  const Scalar col = (plan.colwise().sum().transpose() - b).cwiseAbs().maxCoeff();
  return std::max(row, col);
}

// <C, P>
template <typename Scalar>
Scalar transport_cost(const Matrix<Scalar>& cost, const Matrix<Scalar>& plan) {
  if (cost.rows() != plan.rows() || cost.cols() != plan.cols())
    throw DimensionError("transport_cost: cost and plan shapes differ");
  return cost.cwiseProduct(plan).sum();
}

template <typename Scalar>
Scalar transport_cost(const Matrix<Scalar>& cost, const Coupling<Scalar>& coupling) {
  return transport_cost(cost, coupling.plan);
}

namespace detail {

template <typename Scalar>
void check_problem(const Matrix<Scalar>& cost, const Vector<Scalar>& a, const Vector<Scalar>& b,
                   const char* who) {
  if (cost.rows() != a.size() || cost.cols() != b.size())
    throw DimensionError(std::string(who) + ": cost shape does not match marginals");
  if (!cost.allFinite()) throw InputError(std::string(who) + ": cost matrix has non-finite entries");
  validate_weights(a, who);
  validate_weights(b, who);
}

}  // namespace detail

}  // namespace oops
