#include "oracles.hpp"

#include "oops/assignment.hpp"
#include "oops/coupling.hpp"
#include "oops/distance.hpp"
#include "oops/greedy.hpp"
#include "oops/measure.hpp"
#include "oops/metric.hpp"
#include "oops/sinkhorn.hpp"

#include <doctest.h>

#include <random>

using namespace oops;
using oops::testing::random_matrix;
using oops::testing::sorted_matching_cost;

namespace {

Trajectory line(std::initializer_list<double> xs) {
  Trajectory t;
  t.states.resize(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) t.states(i++, 0) = x;
  return t;
}

Eigen::MatrixXd column(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

const DistanceMetric kEuclid{BaseDistance::kEuclidean, 1};

}  // namespace

TEST_CASE("atomize builds uniform measures in each occupancy space") {
  const Trajectory t = line({0, 1, 2});
  const auto ss = atomize(t, Atomization::kStateTransition);
  REQUIRE(ss.size() == 2);
  CHECK(ss.atoms(0, 0) == 0.0);
  CHECK(ss.atoms(0, 1) == 1.0);
  CHECK(ss.atoms(1, 0) == 1.0);
  CHECK(ss.atoms(1, 1) == 2.0);
  CHECK(ss.weights(0) == 0.5);
  CHECK(ss.weights(1) == 0.5);

  const auto s = atomize(t, Atomization::kState);
  REQUIRE(s.size() == 3);
  CHECK(s.weights(2) == doctest::Approx(1.0 / 3.0));

  const auto single = atomize(line({0, 1}), Atomization::kStateTransition);
  REQUIRE(single.size() == 1);
  CHECK(single.weights(0) == 1.0);

  CHECK_THROWS_AS(atomize(t, Atomization::kStateAction), MissingActionsError);
  Trajectory with_actions = t;
  with_actions.actions = column({5, 6});
  const auto sa = atomize(with_actions, Atomization::kStateAction);
  REQUIRE(sa.size() == 2);
  CHECK(sa.atoms(1, 0) == 1.0);
  CHECK(sa.atoms(1, 1) == 6.0);
}

TEST_CASE("trajectory validation rejects bad shapes") {
  Trajectory t = line({0, 1, 2});
  t.actions = column({1});
  CHECK_THROWS_AS(t.validate(), InputError);
  Trajectory empty;
  CHECK_THROWS_AS(empty.validate(), InputError);
  Trajectory nan = line({0, std::nan("")});
  CHECK_THROWS_AS(nan.validate(), InputError);
}

TEST_CASE("pairwise distances") {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1), four = Eigen::VectorXd::Constant(1, 4.0);
  CHECK(pairwise_distance(zero, four, {BaseDistance::kSqrtEuclidean, 1}) == 2.0);
  CHECK(pairwise_distance(zero, four, kEuclid) == 4.0);

  const Eigen::Vector2d e0(1, 0), e1(0, 1), v(0.3, -2.0);
  CHECK(pairwise_distance(e0, e1, {BaseDistance::kCosine, 1}) == doctest::Approx(1.0));
  for (const auto& m : {DistanceMetric{BaseDistance::kEuclidean, 1}, DistanceMetric{BaseDistance::kSqrtEuclidean, 1},
                        DistanceMetric{BaseDistance::kCosine, 1}, DistanceMetric{BaseDistance::kEuclidean, 2}}) {
    CHECK(pairwise_distance(v, v, m) == 0.0);
  }
  // Zero-vector convention for cosine.
  const Eigen::Vector2d z = Eigen::Vector2d::Zero();
  CHECK(pairwise_distance(z, z, {BaseDistance::kCosine, 1}) == 0.0);
  CHECK(pairwise_distance(z, e1, {BaseDistance::kCosine, 1}) == 1.0);

  CHECK_THROWS_AS(pairwise_distance(e0, Eigen::VectorXd::Zero(3), kEuclid), DimensionError);
}

TEST_CASE("metric combinations are restricted") {
  CHECK_THROWS_AS((DistanceMetric{BaseDistance::kCosine, 2}).validate(), ConfigError);
  CHECK_THROWS_AS((DistanceMetric{BaseDistance::kSqrtEuclidean, 2}).validate(), ConfigError);
  CHECK_NOTHROW((DistanceMetric{BaseDistance::kEuclidean, 2}).validate());
  CHECK(DistanceMetric::parse("euclidean-w2").order == 2);
  CHECK_THROWS_AS(DistanceMetric::parse("manhattan"), ConfigError);
}

TEST_CASE("cost matrix entries") {
  const Eigen::MatrixXd c = cost_matrix(column({0, 1}), column({0, 2}), kEuclid);
  CHECK(c(0, 0) == 0.0);
  CHECK(c(0, 1) == 2.0);
  CHECK(c(1, 0) == 1.0);
  CHECK(c(1, 1) == 1.0);

  const Eigen::MatrixXd sq = cost_matrix(column({0}), column({3}), {BaseDistance::kEuclidean, 2});
  CHECK(sq(0, 0) == 9.0);

  std::mt19937_64 rng(1);
  const Eigen::MatrixXd atoms = random_matrix(5, 3, rng);
  const Eigen::MatrixXd self = cost_matrix(atoms, atoms, {BaseDistance::kSqrtEuclidean, 1});
  CHECK(self.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(self.minCoeff() >= 0.0);

  CHECK_THROWS_AS(cost_matrix(random_matrix(2, 2, rng), random_matrix(2, 3, rng), kEuclid), DimensionError);
}

TEST_CASE("transport cost") {
  Eigen::MatrixXd cost(2, 2);
  cost << 0, 2, 1, 1;
  const Eigen::MatrixXd diag = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  CHECK(transport_cost(cost, diag) == 0.5);
  CHECK(transport_cost(Eigen::MatrixXd::Zero(2, 2).eval(), diag) == 0.0);
  CHECK_THROWS_AS(transport_cost(cost, Eigen::MatrixXd::Zero(3, 2).eval()), DimensionError);
}

TEST_CASE("brute force oracle") {
  Eigen::MatrixXd one(1, 1);
  one << 3.5;
  CHECK(brute_force_w1(one) == 3.5);
  Eigen::MatrixXd cost(2, 2);
  cost << 0, 2, 1, 1;
  CHECK(brute_force_w1(cost) == 0.5);
  CHECK_THROWS_AS(brute_force_w1(Eigen::MatrixXd::Zero(9, 9).eval()), SizeError);
}

TEST_CASE("exact solver matches brute force and the 1-D closed form") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + trial % 8;
    const Eigen::MatrixXd cost = random_matrix(n, n, rng, 0.0, 3.0);
    const Eigen::VectorXd u = uniform_weights<double>(n);
    const auto exact = exact_w1(cost, u, u);
    CHECK(exact.value == brute_force_w1(cost));
    CHECK(exact.coupling.residual <= 1e-12);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial;
    std::uniform_real_distribution<double> pos(-3.0, 3.0);
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    Eigen::MatrixXd xa(n, 1), ya(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      xa(i, 0) = x[static_cast<std::size_t>(i)] = pos(rng);
      ya(i, 0) = y[static_cast<std::size_t>(i)] = pos(rng);
    }
    const Eigen::VectorXd u = uniform_weights<double>(n);
    CHECK(std::abs(exact_w1(cost_matrix(xa, ya, kEuclid), u, u).value - sorted_matching_cost(x, y)) <= 1e-12);
  }
}

TEST_CASE("exact solver on identical measures is the identity") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd atoms = random_matrix(6, 2, rng);
  const Eigen::VectorXd u = uniform_weights<double>(6);
  const auto exact = exact_w1(cost_matrix(atoms, atoms, kEuclid), u, u);
  CHECK(exact.value == 0.0);
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(exact.permutation[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("exact solver rejects unsupported instances") {
  const Eigen::MatrixXd cost = Eigen::MatrixXd::Ones(2, 3);
  CHECK_THROWS_AS(exact_w1(cost, uniform_weights<double>(2), uniform_weights<double>(3)), UnsupportedInstance);
  Eigen::VectorXd skew(2);
  skew << 0.25, 0.75;
  const Eigen::MatrixXd sq = Eigen::MatrixXd::Ones(2, 2);
  CHECK_THROWS_AS(exact_w1(sq, skew, uniform_weights<double>(2)), UnsupportedInstance);
}

TEST_CASE("greedy coupling") {
  // Learner [1, 2] vs expert [0, 1.5]: 1 takes 1.5 first, leaving 0 for 2.
  const Eigen::MatrixXd cost = cost_matrix(column({1, 2}), column({0, 1.5}), kEuclid);
  const Eigen::VectorXd u = uniform_weights<double>(2);
  const auto greedy = greedy_coupling(cost, u, u);
  CHECK(transport_cost(cost, greedy) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(greedy.residual <= 1e-12);
  // Both permutations enumerated: identity (1->0, 2->1.5) = 0.75, swap = 1.25.
  CHECK(exact_w1(cost, u, u).value == doctest::Approx(0.75).epsilon(1e-15));

  const Eigen::MatrixXd same = cost_matrix(column({0, 1, 2}), column({0, 1, 2}), kEuclid);
  const Eigen::VectorXd u3 = uniform_weights<double>(3);
  CHECK(transport_cost(same, greedy_coupling(same, u3, u3)) == 0.0);

  // Ties go to the lowest index.
  const Eigen::MatrixXd ties = Eigen::MatrixXd::Ones(2, 2);
  const auto tied = greedy_coupling(ties, u, u);
  CHECK(tied.plan(0, 0) == 0.5);
  CHECK(tied.plan(1, 1) == 0.5);
}

TEST_CASE("greedy splits mass across targets for unequal sizes") {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd cost = random_matrix(3, 5, rng);
  const Eigen::VectorXd a = uniform_weights<double>(3), b = uniform_weights<double>(5);
  const auto g = greedy_coupling(cost, a, b);
  CHECK(g.residual <= 1e-12);
  CHECK(g.plan.minCoeff() >= 0.0);
}

TEST_CASE("sinkhorn on near-identical and shifted measures") {
  const SinkhornConfig tight{0.001, 20000, 1e-9};
  const Eigen::VectorXd u = uniform_weights<double>(2);

  const Eigen::MatrixXd same = cost_matrix(column({0, 1}), column({0, 1}), kEuclid);
  const auto p = sinkhorn(same, u, u, tight);
  CHECK(transport_cost(same, p) <= 1e-3 * same.maxCoeff());
  CHECK(p.residual <= 1e-9);

  const Eigen::MatrixXd shifted = cost_matrix(column({0, 1}), column({1, 2}), kEuclid);
  const double c = transport_cost(shifted, sinkhorn(shifted, u, u, tight));
  CHECK(c >= 1.0 - 1e-12);
  CHECK(c <= 1.01);
}

TEST_CASE("sinkhorn output is feasible for any input") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 3 + trial % 7, m = 2 + trial % 5;
    const Eigen::MatrixXd cost = random_matrix(n, m, rng, 0.0, 10.0);
    Eigen::VectorXd a = random_matrix(n, 1, rng, 0.1, 1.0), b = random_matrix(m, 1, rng, 0.1, 1.0);
    a /= a.sum();
    b /= b.sum();
    for (double lambda : {0.001, 0.05, 1.0}) {
      // A deliberately tiny budget still yields a feasible plan after rounding.
      for (int iters : {1, 20000}) {
        const auto p = sinkhorn(cost, a, b, SinkhornConfig{lambda, iters, 1e-9});
        CHECK(p.residual <= 1e-9);
        CHECK(p.plan.minCoeff() >= 0.0);
      }
    }
  }
}

TEST_CASE("sinkhorn handles zero-weight atoms and rejects bad input") {
  Eigen::VectorXd a(3);
  a << 0.5, 0.0, 0.5;
  const Eigen::VectorXd b = uniform_weights<double>(2);
  Eigen::MatrixXd cost(3, 2);
  cost << 0, 1, 5, 5, 1, 0;
  const auto p = sinkhorn(cost, a, b, SinkhornConfig{0.01, 20000, 1e-9});
  CHECK(p.plan.row(1).sum() == 0.0);
  CHECK(p.residual <= 1e-9);

  Eigen::MatrixXd bad = cost;
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(sinkhorn(bad, a, b, SinkhornConfig{}), InputError);
  CHECK_THROWS_AS(sinkhorn(cost, a, b, SinkhornConfig{0.0, 10, 1e-9}), ConfigError);
}

TEST_CASE("sinkhorn reports non-convergence instead of failing") {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd cost = random_matrix(20, 20, rng, 0.0, 5.0);
  const Eigen::VectorXd u = uniform_weights<double>(20);
  const auto p = sinkhorn(cost, u, u, SinkhornConfig{0.0005, 3, 1e-12});
  CHECK_FALSE(p.converged);
  CHECK(p.iterations == 3);
  CHECK(p.residual <= 1e-12);
}

TEST_CASE("solvers are ordered: exact <= sinkhorn, exact <= greedy") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 4 + trial % 12;
    const Eigen::MatrixXd x = random_matrix(n, 2, rng), y = random_matrix(n, 2, rng);
    const Eigen::MatrixXd cost = cost_matrix(x, y, {BaseDistance::kSqrtEuclidean, 1});
    const Eigen::VectorXd u = uniform_weights<double>(n);
    const double exact = exact_w1(cost, u, u).value;
    CHECK(exact <= transport_cost(cost, greedy_coupling(cost, u, u)) + 1e-12);
    for (double lambda : {0.001, 0.05, 0.5})
      CHECK(exact <= transport_cost(cost, sinkhorn(cost, u, u, SinkhornConfig{lambda, 20000, 1e-9})) + 1e-12);
  }
}

TEST_CASE("trajectory distance composes the pipeline") {
  const Trajectory a = line({0, 1, 2}), b = line({0, 1, 3});
  const SolverChoice exact{SolverKind::kExact, {}};
  const auto d = trajectory_distance(a, b, Atomization::kStateTransition, kEuclid, exact);
  CHECK(d.value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d.coupling.solver == SolverTag::kExact);

  const SolverChoice sk{SolverKind::kSinkhorn, SinkhornConfig{0.001, 20000, 1e-9}};
  const double approx = trajectory_distance(a, b, Atomization::kStateTransition, kEuclid, sk).value;
  CHECK(approx >= d.value - 1e-12);
  CHECK(approx <= 1.01 * d.value);

  CHECK(trajectory_distance(a, a, Atomization::kState, kEuclid, exact).value == 0.0);

  // W2 reports the square root of the squared-distance objective.
  const auto w2 = trajectory_distance(line({0, 0}), line({3, 3}), Atomization::kState,
                                      {BaseDistance::kEuclidean, 2}, exact);
  CHECK(w2.cost_objective == 9.0);
  CHECK(w2.value == 3.0);
}

TEST_CASE("exact solver falls back to tight sinkhorn on unequal lengths") {
  const Trajectory a = line({0, 1, 2, 3}), b = line({0, 1, 2});
  const auto d = trajectory_distance(a, b, Atomization::kStateTransition, kEuclid, {SolverKind::kExact, {}});
  CHECK(d.coupling.solver == SolverTag::kSinkhorn);
  CHECK(d.coupling.residual <= 1e-9);
}

TEST_CASE("trajectory distance properties: symmetry and metric zero") {
  std::mt19937_64 rng(33);
  const SolverChoice exact{SolverKind::kExact, {}};
  for (int trial = 0; trial < 20; ++trial) {
    Trajectory a, b;
    a.states = random_matrix(6, 3, rng);
    b.states = random_matrix(6, 3, rng);
    a.actions = random_matrix(5, 2, rng);
    b.actions = random_matrix(5, 2, rng);
    for (Atomization mode : {Atomization::kState, Atomization::kStateTransition, Atomization::kStateAction}) {
      for (const char* name : {"euclidean", "sqrt-euclidean", "cosine", "euclidean-w2"}) {
        const DistanceMetric m = DistanceMetric::parse(name);
        const double ab = trajectory_distance(a, b, mode, m, exact).value;
        const double ba = trajectory_distance(b, a, mode, m, exact).value;
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(trajectory_distance(a, a, mode, m, exact).value == 0.0);
      }
    }
  }
}

TEST_CASE("float scalar instantiation") {
  Eigen::MatrixXf cost(2, 2);
  cost << 0.f, 2.f, 1.f, 1.f;
  const Eigen::VectorXf u = uniform_weights<float>(2);
  CHECK(exact_w1(cost, u, u).value == 0.5f);
  CHECK(sinkhorn(cost, u, u, SinkhornConfig{0.05, 20000, 1e-5}).residual <= 1e-5f);
}
