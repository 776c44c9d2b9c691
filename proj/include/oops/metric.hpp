#pragma once

#include "oops/errors.hpp"
#include "oops/measure.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

namespace oops {

enum class BaseDistance { kEuclidean, kSqrtEuclidean, kCosine };

// Ground distance d and the order p of the transport cost d^p.
struct DistanceMetric {
  BaseDistance base = BaseDistance::kSqrtEuclidean;
  int order = 1;

  // Only the combinations W1 {euclidean, sqrt-euclidean, cosine} and W2 euclidean are allowed.
  void validate() const;

  // Short names used in configs and CSVs: "euclidean", "sqrt-euclidean",
  // "cosine", "euclidean-w2".
  std::string name() const;
  static DistanceMetric parse(std::string_view name);
};

inline constexpr double kCosineZeroNorm = 1e-12;

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar pairwise_distance(const Eigen::MatrixBase<DerivedX>& x,
                                            const Eigen::MatrixBase<DerivedY>& y,
                                            const DistanceMetric& metric) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size()) throw DimensionError("pairwise_distance: vector lengths differ");
  const Eigen::Index n = x.size();
  switch (metric.base) {
    case BaseDistance::kEuclidean:
    case BaseDistance::kSqrtEuclidean: {
      Scalar sq(0);
      for (Eigen::Index k = 0; k < n; ++k) {
        const Scalar diff = x.coeff(k) - static_cast<Scalar>(y.coeff(k));
        sq += diff * diff;
      }
      const Scalar norm = std::sqrt(sq);
      return metric.base == BaseDistance::kEuclidean ? norm : std::sqrt(norm);
    }
    case BaseDistance::kCosine: {
      bool identical = true;
      Scalar dot(0), xx(0), yy(0);
      for (Eigen::Index k = 0; k < n; ++k) {
        const Scalar xk = x.coeff(k);
        const Scalar yk = static_cast<Scalar>(y.coeff(k));
        identical = identical && xk == yk;
        dot += xk * yk;
        xx += xk * xk;
        yy += yk * yk;
      }
      const Scalar nx = std::sqrt(xx), ny = std::sqrt(yy);
      const bool x_zero = nx <= Scalar(kCosineZeroNorm);
      const bool y_zero = ny <= Scalar(kCosineZeroNorm);
      if (x_zero || y_zero) return (x_zero && y_zero) ? Scalar(0) : Scalar(1);
      if (identical) return Scalar(0);
      const Scalar cos = std::min(Scalar(1), std::max(Scalar(-1), dot / (nx * ny)));
      return Scalar(1) - cos;
    }
  }
  return Scalar(0);
}

// C(i, j) = d(mu_i, nu_j)^p over the atom rows of the two measures.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> cost_matrix(const Eigen::MatrixBase<DerivedA>& mu_atoms,
                                              const Eigen::MatrixBase<DerivedB>& nu_atoms,
                                              const DistanceMetric& metric) {
  using Scalar = typename DerivedA::Scalar;
  metric.validate();
  if (mu_atoms.cols() != nu_atoms.cols())
    throw DimensionError("cost_matrix: atom dimensions differ (" + std::to_string(mu_atoms.cols()) +
                         " vs " + std::to_string(nu_atoms.cols()) + ")");
  Matrix<Scalar> cost(mu_atoms.rows(), nu_atoms.rows());
  for (Eigen::Index i = 0; i < mu_atoms.rows(); ++i) {
    for (Eigen::Index j = 0; j < nu_atoms.rows(); ++j) {
      const Scalar d = pairwise_distance(mu_atoms.row(i), nu_atoms.row(j), metric);
      cost(i, j) = metric.order == 2 ? d * d : d;
    }
  }
  return cost;
}

template <typename Scalar>
Matrix<Scalar> cost_matrix(const DiscreteMeasure<Scalar>& mu, const DiscreteMeasure<Scalar>& nu,
                           const DistanceMetric& metric) {
  return cost_matrix(mu.atoms, nu.atoms, metric);
}

}  // namespace oops
