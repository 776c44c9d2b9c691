#pragma once

#include "oops/coupling.hpp"
#include "oops/errors.hpp"
#include "oops/measure.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oops {

struct SinkhornConfig {
  double lambda = 0.05;
  int max_iterations = 20000;
  // L-infinity marginal violation at which iterations stop.
  double marginal_tolerance = 1e-9;

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("sinkhorn: lambda must be > 0");
    if (max_iterations < 1) throw ConfigError("sinkhorn: max_iterations must be >= 1");
    if (!(marginal_tolerance > 0.0)) throw ConfigError("sinkhorn: marginal_tolerance must be > 0");
  }
};

// Projects a nonnegative matrix onto the transportation polytope U(a, b):
// rows are scaled down to fit a, columns scaled down to fit b, and the
// remaining deficit is added back as a rank-one correction err_a err_b^T / |err_b|_1.
template <typename Scalar>
void round_to_marginals(Matrix<Scalar>& plan, const Vector<Scalar>& a, const Vector<Scalar>& b) {
  Vector<Scalar> rows = plan.rowwise().sum();
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    if (rows(i) > a(i)) plan.row(i) *= a(i) / rows(i);
  }
  Vector<Scalar> cols = plan.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < plan.cols(); ++j) {
    if (cols(j) > b(j)) plan.col(j) *= b(j) / cols(j);
  }
  const Vector<Scalar> err_a = (a - plan.rowwise().sum()).cwiseMax(Scalar(0));
  const Vector<Scalar> err_b = (b - plan.colwise().sum().transpose()).cwiseMax(Scalar(0));
  const Scalar mass = err_b.sum();
  if (mass > Scalar(0)) plan.noalias() += err_a * err_b.transpose() / mass;
}

namespace detail {

// out_i = lam * (log_w_i - logsumexp_j((dual_j - cost_ij) / lam)), i.e. the
// soft c-transform of `dual` along the rows of `cost`.
template <typename Scalar>
void soft_c_transform(const Matrix<Scalar>& cost, const Vector<Scalar>& dual,
                      const Vector<Scalar>& log_w, Scalar lam, Matrix<Scalar>& work,
                      Vector<Scalar>& out) {
  work = (-cost).rowwise() + dual.transpose();
  const Vector<Scalar> mx = work.rowwise().maxCoeff();
  work.colwise() -= mx;
  const Vector<Scalar> lse = mx.array() + lam * (work.array() / lam).exp().rowwise().sum().log();
  out = lam * log_w.array() - lse.array();
}

}  // namespace detail

// Entropy-regularized transport, stabilized in the log domain. Dual
// potentials (f, g) are kept in log space and the scaling iterations run on
// the absorbed kernel exp((f_i + g_j - C_ij) / lambda); scalings are folded
// back into the potentials when they drift far from 1 or a kernel row
// underflows, in which case one exact log-domain update is taken. The
// regularization weight is annealed geometrically from max(C) down to
// cfg.lambda, warm-starting each stage; only the last stage has to meet the
// tolerance. The returned plan is rounded onto U(a, b), so its transport cost
// is a valid upper bound on the unregularized optimum. `converged` is false
// when the iteration budget ran out first.
template <typename Scalar>
Coupling<Scalar> sinkhorn(const Matrix<Scalar>& cost, const Vector<Scalar>& a,
                          const Vector<Scalar>& b, const SinkhornConfig& cfg) {
  cfg.validate();
  detail::check_problem(cost, a, b, "sinkhorn");

  // Zero-weight atoms carry no mass; solve on the support only.
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) > Scalar(0)) rows.push_back(i);
  for (Eigen::Index j = 0; j < b.size(); ++j)
    if (b(j) > Scalar(0)) cols.push_back(j);
  const Matrix<Scalar> c = cost(rows, cols);
  const Vector<Scalar> sa = a(rows), sb = b(cols);
  const Vector<Scalar> log_a = sa.array().log(), log_b = sb.array().log();
  const Matrix<Scalar> ct = c.transpose();

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = static_cast<Eigen::Index>(cols.size());
  Vector<Scalar> f = Vector<Scalar>::Zero(n), g = Vector<Scalar>::Zero(m);
  Vector<Scalar> u = Vector<Scalar>::Ones(n), v = Vector<Scalar>::Ones(m), kv(n), ktu(m);
  Matrix<Scalar> kernel(n, m), work_rows(n, m), work_cols(m, n);

  const Scalar target = static_cast<Scalar>(cfg.lambda);
  const Scalar tol = static_cast<Scalar>(cfg.marginal_tolerance);
  const Scalar stage_tol = std::max(tol, Scalar(1e-6));
  const Scalar big = Scalar(1) / std::sqrt(std::numeric_limits<Scalar>::epsilon()) * Scalar(1e4);
  constexpr int kStageIterations = 500;
  Scalar lam = std::max(target, c.maxCoeff());

  const auto absorb = [&] {
    f.array() += lam * u.array().log();
    g.array() += lam * v.array().log();
    u.setOnes();
    v.setOnes();
    kernel = ((((-c).colwise() + f).rowwise() + g.transpose()).array() / lam).exp().matrix();
  };
  const auto usable = [](const Vector<Scalar>& x) {
    return (x.array() > Scalar(0)).all() && x.allFinite();
  };

  int iterations = 0;
  bool converged = false;
  while (iterations < cfg.max_iterations) {
    const bool final_stage = lam <= target;
    const Scalar want = final_stage ? tol : stage_tol;
    absorb();
    bool have_plan = false;
    int stage_iterations = 0;
    while (iterations < cfg.max_iterations && (final_stage || stage_iterations < kStageIterations)) {
      kv.noalias() = kernel * v;
      if (have_plan && usable(kv)) {
        // Columns of the current plan are exact; u .* Kv are its row sums.
        const Scalar viol = (u.cwiseProduct(kv) - sa).cwiseAbs().maxCoeff();
        if (viol <= want) {
          converged = final_stage;
          break;
        }
      }
      if (usable(kv)) {
        u = sa.cwiseQuotient(kv);
        ktu.noalias() = kernel.transpose() * u;
      }
      if (!usable(kv) || !usable(ktu)) {
        absorb();
        detail::soft_c_transform(c, g, log_a, lam, work_rows, f);
        detail::soft_c_transform(ct, f, log_b, lam, work_cols, g);
        absorb();
      } else {
        v = sb.cwiseQuotient(ktu);
        if (u.maxCoeff() > big || v.maxCoeff() > big || u.minCoeff() < 1 / big || v.minCoeff() < 1 / big) absorb();
      }
      have_plan = true;
      ++iterations;
      ++stage_iterations;
    }
    if (final_stage) break;
    lam = std::max(target, lam / Scalar(2));
  }

  absorb();
  Matrix<Scalar> plan = kernel;
  round_to_marginals(plan, sa, sb);

  Coupling<Scalar> out;
  out.plan = Matrix<Scalar>::Zero(cost.rows(), cost.cols());
  out.plan(rows, cols) = plan;
  out.row_marginal = a;
  out.col_marginal = b;
  out.solver = SolverTag::kSinkhorn;
  out.residual = marginal_residual(out.plan, a, b);
  out.iterations = iterations;
  out.converged = converged;
  return out;
}

}  // namespace oops
