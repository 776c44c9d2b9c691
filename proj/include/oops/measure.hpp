#pragma once

#include "oops/errors.hpp"
#include "oops/trajectory.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <string_view>

namespace oops {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Which space the atoms of a trajectory measure live in.
enum class Atomization {
  kState,            // s_t, T+1 atoms
  kStateTransition,  // [s_t | s_{t+1}], T atoms
  kStateAction,      // [s_t | a_t], T atoms
};

std::string_view to_string(Atomization mode);
Atomization parse_atomization(std::string_view name);

// Atoms are the rows of `atoms`; `weights` sum to one.
template <typename Scalar>
struct DiscreteMeasure {
  Matrix<Scalar> atoms;
  Vector<Scalar> weights;

  Eigen::Index size() const { return atoms.rows(); }
  Eigen::Index dim() const { return atoms.cols(); }
};

template <typename Scalar>
Vector<Scalar> uniform_weights(Eigen::Index n) {
  return Vector<Scalar>::Constant(n, Scalar(1) / static_cast<Scalar>(n));
}

template <typename Scalar>
void validate_weights(const Vector<Scalar>& w, const char* what) {
  if (w.size() == 0) throw InputError(std::string(what) + ": empty weight vector");
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!std::isfinite(static_cast<double>(w(i))) || w(i) < Scalar(0))
      throw InputError(std::string(what) + ": weights must be finite and nonnegative");
  }
  if (std::abs(static_cast<double>(w.sum()) - 1.0) > 1e-12)
    throw InputError(std::string(what) + ": weights must sum to one");
}

template <typename Scalar>
void validate(const DiscreteMeasure<Scalar>& mu) {
  if (mu.atoms.rows() != mu.weights.size())
    throw DimensionError("measure: atom count and weight count differ");
  validate_weights(mu.weights, "measure");
}

// Uniform-weight measure over the atoms of `traj` under `mode`. Truncated
// episodes simply contribute fewer atoms.
template <typename Scalar = double>
DiscreteMeasure<Scalar> atomize(const Trajectory& traj, Atomization mode) {
  traj.validate();
  const Eigen::Index n_states = traj.num_states();
  const Eigen::Index d = traj.state_dim();
  DiscreteMeasure<Scalar> mu;
  switch (mode) {
    case Atomization::kState:
      mu.atoms = traj.states.cast<Scalar>();
      break;
    case Atomization::kStateTransition: {
      if (n_states < 2) throw InputError("atomize: (s,s') needs at least one transition");
      const Eigen::Index t = n_states - 1;
      mu.atoms.resize(t, 2 * d);
      mu.atoms.leftCols(d) = traj.states.topRows(t).cast<Scalar>();
      mu.atoms.rightCols(d) = traj.states.bottomRows(t).cast<Scalar>();
      break;
    }
    case Atomization::kStateAction: {
      if (!traj.has_actions())
        throw MissingActionsError("atomize: (s,a) mode needs a trajectory with actions");
      const Eigen::MatrixXd& acts = *traj.actions;
      const Eigen::Index t = acts.rows();
      if (t < 1) throw InputError("atomize: (s,a) needs at least one action");
      mu.atoms.resize(t, d + acts.cols());
      mu.atoms.leftCols(d) = traj.states.topRows(t).cast<Scalar>();
      mu.atoms.rightCols(acts.cols()) = acts.cast<Scalar>();
      break;
    }
  }
  mu.weights = uniform_weights<Scalar>(mu.atoms.rows());
  return mu;
}

}  // namespace oops
