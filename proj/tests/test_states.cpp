#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relent/states.hpp"

using namespace relent;

namespace {

DensityOperator diag_state(std::initializer_list<double> probs) {
  const Eigen::Index d = static_cast<Eigen::Index>(probs.size());
  Matrix m = Matrix::Zero(d, d);
  Eigen::Index i = 0;
  for (double p : probs) m(i, i) = p, ++i;
  return DensityOperator(m);
}

// independent scalar oracle: -sum p log p over positive entries
double entropy_oracle(std::initializer_list<double> probs) {
  double s = 0.0;
  for (double p : probs)
    if (p > 0) s -= p * std::log(p);
  return s;
}

}  // namespace

TEST_CASE("DensityOperator invariants") {
  CHECK_THROWS_AS(diag_state({0.5, 0.6}), StateError);  // trace 1.1
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityOperator{neg}, StateError);
  CHECK(diag_state({0.5, 0.5}).trace_defect() < 1e-12);
}

TEST_CASE("von Neumann entropy: pure, mixed, skewed") {
  CHECK(von_neumann_entropy(diag_state({1.0, 0.0})) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(von_neumann_entropy(diag_state({0.5, 0.5})) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(von_neumann_entropy(diag_state({0.75, 0.25})) ==
        doctest::Approx(entropy_oracle({0.75, 0.25})).epsilon(1e-12));
  // frozen value from the scalar oracle
  CHECK(von_neumann_entropy(diag_state({0.75, 0.25})) ==
        doctest::Approx(0.5623351446188083).epsilon(1e-12));
}

TEST_CASE("regularized entropy limit converges to the support-based value") {
  const auto schedule = default_eps_schedule();
  REQUIRE(schedule.size() == 7);
  CHECK(schedule.front() == doctest::Approx(1e-2));
  CHECK(schedule.back() == doctest::Approx(1e-8));

  for (const DensityOperator& rho :
       {diag_state({1.0, 0.0}), diag_state({0.5, 0.5}),
        diag_state({0.75, 0.25})}) {
    const RegularizedEntropySequence seq =
        regularized_entropy_limit(rho, schedule);
    const double eps_last = schedule.back();
    const double tol =
        10.0 * eps_last * static_cast<double>(rho.dim()) * std::abs(std::log(eps_last));
    CHECK(std::abs(seq.last - von_neumann_entropy(rho)) <= tol);
  }

  CHECK_THROWS_AS(
      regularized_entropy_limit(diag_state({0.5, 0.5}), {1e-2, 1e-2}),
      ScheduleError);
  CHECK_THROWS_AS(
      regularized_entropy_limit(diag_state({0.5, 0.5}), {1e-4, 1e-2}),
      ScheduleError);
}

TEST_CASE("random_density: rank control and determinism") {
  CounterRng rng(42);
  const DensityOperator pure = random_density(2, 1, rng);
  CHECK(von_neumann_entropy(pure) <= 1e-9);

  const DensityOperator full = random_density(4, 4, rng);
  CHECK(min_eigenvalue(full.op()) > 0.0);

  CounterRng r1 = CounterRng::substream(42, "state", 0);
  CounterRng r2 = CounterRng::substream(42, "state", 0);
  const DensityOperator a = random_density(2, 2, r1);
  const DensityOperator b = random_density(2, 2, r2);
  CHECK((a.mat() - b.mat()).norm() == 0.0);  // bit-identical

  CHECK_THROWS_AS(random_density(2, 3, rng), DomainError);
  CHECK_THROWS_AS(random_density(2, 0, rng), DomainError);
}

TEST_CASE("support_contained: nesting detection") {
  const DensityOperator pure0 = diag_state({1.0, 0.0});
  const DensityOperator pure1 = diag_state({0.0, 1.0});
  const DensityOperator mixed = diag_state({0.5, 0.5});

  CHECK(support_contained(pure0, mixed));
  CHECK(!support_contained(pure0, pure1));
  CHECK(support_contained(pure0, pure0));
  CHECK(!support_contained(mixed, pure0));
}

TEST_CASE("property: entropy bounds over random states") {
  CounterRng rng(77);
  for (int d : {2, 3, 4}) {
    for (int rank = 1; rank <= d; ++rank) {
      for (int trial = 0; trial < 25; ++trial) {
        const double s = von_neumann_entropy(random_density(d, rank, rng));
        CHECK(s >= -1e-10);
        CHECK(s <= std::log(static_cast<double>(d)) + 1e-10);
      }
    }
  }
}

TEST_CASE("property: regularized limit agrees for every rank, d in {2,3,4}") {
  CounterRng rng(78);
  const auto schedule = default_eps_schedule();
  for (int d : {2, 3, 4}) {
    for (int rank = 1; rank <= d; ++rank) {
      for (int trial = 0; trial < 200; ++trial) {
        const DensityOperator rho = random_density(d, rank, rng);
        const RegularizedEntropySequence seq =
            regularized_entropy_limit(rho, schedule);
        const double eps_last = schedule.back();
        const double tol = 10.0 * eps_last * d * std::abs(std::log(eps_last));
        CHECK(std::abs(seq.last - von_neumann_entropy(rho)) <= tol);
      }
    }
  }
}

TEST_CASE("property: support containment is reflexive and transitive") {
  CounterRng rng(79);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityOperator outer = random_density(4, 3, rng);
    const DensityOperator middle = random_density_in_support(outer, 2, rng);
    const DensityOperator inner = random_density_in_support(middle, 1, rng);

    CHECK(support_contained(outer, outer));
    CHECK(support_contained(middle, outer));
    CHECK(support_contained(inner, middle));
    CHECK(support_contained(inner, outer));  // transitivity
  }
}

TEST_CASE("RegularizedState keeps its trace unnormalized") {
  const RegularizedState reg(diag_state({0.5, 0.5}), 1e-3);
  CHECK(reg.op().trace().real() == doctest::Approx(1.0 + 2e-3));
  CHECK(min_eigenvalue(HermitianOperator(reg.op())) > 0.0);
  CHECK_THROWS_AS(RegularizedState(diag_state({0.5, 0.5}), 0.0), DomainError);
}
