#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relent/entropy.hpp"

using namespace relent;

namespace {

DensityOperator diag_state(std::initializer_list<double> probs) {
  const Eigen::Index d = static_cast<Eigen::Index>(probs.size());
  Matrix m = Matrix::Zero(d, d);
  Eigen::Index i = 0;
  for (double p : probs) m(i, i) = p, ++i;
  return DensityOperator(m);
}

// scalar KL divergence oracle for commuting (diagonal) pairs
double kl_oracle(std::initializer_list<double> p, std::initializer_list<double> q) {
  double s = 0.0;
  auto itq = q.begin();
  for (double pi : p) {
    if (pi > 0) s += pi * (std::log(pi) - std::log(*itq));
    ++itq;
  }
  return s;
}

QuantumChannel depolarizer() {
  std::vector<Matrix> kraus;
  Matrix i2 = Matrix::Identity(2, 2);
  Matrix x = Matrix::Zero(2, 2), y = Matrix::Zero(2, 2), z = Matrix::Zero(2, 2);
  x(0, 1) = 1;
  x(1, 0) = 1;
  y(0, 1) = Complex(0, -1);
  y(1, 0) = Complex(0, 1);
  z(0, 0) = 1;
  z(1, 1) = -1;
  for (const Matrix& p : {i2, x, y, z}) kraus.push_back(0.5 * p);
  return QuantumChannel::from_kraus(std::move(kraus));
}

}  // namespace

TEST_CASE("relative_entropy_support: Klein, support violation, KL oracle") {
  CounterRng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityOperator rho = random_density(3, 3, rng);
    const RelEntropyResult self = relative_entropy_support(rho, rho);
    CHECK(self.value.is_finite());
    CHECK(std::abs(self.value.value()) < 1e-10);
  }

  // full-rank mixed against a pure state
  const RelEntropyResult infinite = relative_entropy_support(
      diag_state({0.5, 0.5}), diag_state({1.0, 0.0}));
  CHECK(infinite.branch == EntropyBranch::infinite_support_violation);
  CHECK(infinite.value.is_plus_infinity());

  const RelEntropyResult kl = relative_entropy_support(
      diag_state({0.5, 0.5}), diag_state({0.75, 0.25}));
  CHECK(kl.value.value() ==
        doctest::Approx(kl_oracle({0.5, 0.5}, {0.75, 0.25})).epsilon(1e-12));
  CHECK(kl.value.value() == doctest::Approx(0.1438410362258904).epsilon(1e-12));
}

TEST_CASE("relative_entropy_support agrees with the matrix-log route") {
  CounterRng rng(42);
  for (int d : {2, 3, 4}) {
    for (int trial = 0; trial < 10; ++trial) {
      const DensityOperator rho = random_density(d, d, rng);
      const DensityOperator sigma = random_density(d, d, rng);
      // independent evaluation: Tr(rho log rho) - Tr(rho log sigma)
      auto log_of = [](const DensityOperator& s) {
        return matrix_function(
            s.op(), [](double x) { return std::log(x); }, Interval::positive());
      };
      const double direct =
          ((rho.mat() * log_of(rho).mat()).trace() -
           (rho.mat() * log_of(sigma).mat()).trace())
              .real();
      const RelEntropyResult result = relative_entropy_support(rho, sigma);
      CHECK(result.value.value() == doctest::Approx(direct).epsilon(1e-9));
      CHECK(result.value.value() >= -1e-9);  // Klein
    }
  }
}

TEST_CASE("relative_entropy_regularized: convergent and divergent branches") {
  const auto schedule = default_eps_schedule();

  CounterRng rng(43);
  const DensityOperator rho = random_density(3, 3, rng);
  const RegularizedRelEntropy self =
      relative_entropy_regularized(rho, rho, schedule);
  CHECK(!self.divergent);
  CHECK(std::abs(self.values.back()) < 1e-7);

  const RegularizedRelEntropy kl = relative_entropy_regularized(
      diag_state({0.5, 0.5}), diag_state({0.75, 0.25}), schedule);
  CHECK(!kl.divergent);
  CHECK(kl.values.back() == doctest::Approx(0.1438410362258904).epsilon(1e-6));

  // orthogonal pure states diverge with |log eps| coefficient 1
  const RegularizedRelEntropy div = relative_entropy_regularized(
      diag_state({1.0, 0.0}), diag_state({0.0, 1.0}), schedule);
  CHECK(div.divergent);
  CHECK(div.limit.is_plus_infinity());
  CHECK(div.slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("branch coherence between the two definitions") {
  CounterRng rng(44);
  const auto schedule = default_eps_schedule();
  for (int d : {2, 3, 4}) {
    for (int r_rho = 1; r_rho <= d; ++r_rho) {
      for (int r_sigma = 1; r_sigma <= d; ++r_sigma) {
        for (int trial = 0; trial < 4; ++trial) {
          const DensityOperator rho = random_density(d, r_rho, rng);
          const DensityOperator sigma = random_density(d, r_sigma, rng);
          const RelEntropyResult support = relative_entropy_support(rho, sigma);
          const RegularizedRelEntropy reg =
              relative_entropy_regularized(rho, sigma, schedule);
          CHECK(support.value.is_finite() == !reg.divergent);
          if (support.value.is_finite()) {
            const double s = support.value.value();
            CHECK(std::abs(s - reg.values.back()) <= 1e-5 * (1.0 + std::abs(s)));
          }
        }
      }
    }
  }
}

TEST_CASE("check_unitary_invariance") {
  CounterRng rng(45);
  const DensityOperator rho = random_density(3, 3, rng);
  const DensityOperator sigma = random_density(3, 3, rng);

  const UnitaryInvarianceCheck trivial =
      check_unitary_invariance(rho, sigma, Matrix::Identity(3, 3));
  CHECK(trivial.branches_match);
  CHECK(trivial.defect == doctest::Approx(0.0));

  const Matrix u = random_unitary(3, rng);
  const UnitaryInvarianceCheck rotated = check_unitary_invariance(rho, sigma, u);
  CHECK(rotated.branches_match);
  CHECK(rotated.defect <= 1e-8);

  // orthogonal pure states: both sides infinite under the swap unitary
  Matrix swap = Matrix::Zero(2, 2);
  swap(0, 1) = 1;
  swap(1, 0) = 1;
  const UnitaryInvarianceCheck swapped = check_unitary_invariance(
      diag_state({1.0, 0.0}), diag_state({0.0, 1.0}), swap);
  CHECK(swapped.branches_match);

  Matrix not_unitary = Matrix::Identity(3, 3);
  not_unitary(0, 0) = 2.0;
  CHECK_THROWS_AS(check_unitary_invariance(rho, sigma, not_unitary),
                  DomainError);
}

TEST_CASE("check_additivity") {
  CounterRng rng(46);
  const DensityOperator rho1 = random_density(2, 2, rng);
  const DensityOperator sigma1 = random_density(2, 2, rng);
  const DensityOperator rho2 = random_density(2, 2, rng);
  const DensityOperator sigma2 = random_density(2, 2, rng);

  // rho2 = sigma2 reduces the product to the first factor
  CHECK(check_additivity(rho1, sigma1, rho2, rho2) <= 1e-8);
  CHECK(check_additivity(rho1, rho1, rho2, rho2) <= 1e-10);
  CHECK(check_additivity(rho1, sigma1, rho2, sigma2) <= 1e-8);

  const DensityOperator big1 = random_density(5, 5, rng);
  const DensityOperator big2 = random_density(5, 5, rng);
  CHECK_THROWS_AS(check_additivity(big1, big2, big1, big2), DimensionError);
}

TEST_CASE("dpi_via_stinespring: identity, depolarizer, random channels") {
  CounterRng rng(47);
  const DensityOperator rho = random_density(2, 2, rng);
  const DensityOperator sigma = random_density(2, 2, rng);

  const DpiCertificate ident =
      dpi_via_stinespring(rho, sigma, QuantumChannel::identity(2));
  CHECK(ident.holds);
  CHECK(std::abs(ident.gap) < 1e-9);  // equality for a unitary channel
  CHECK(ident.dilation_defect < 1e-9);
  CHECK(ident.unitary_invariance_defect < 1e-8);
  CHECK(ident.additivity_defect < 1e-8);

  const DpiCertificate dep = dpi_via_stinespring(rho, sigma, depolarizer());
  CHECK(dep.holds);
  CHECK(dep.output_entropy.value.value() ==
        doctest::Approx(0.0).epsilon(1e-10));  // both outputs I/2

  for (int trial = 0; trial < 25; ++trial) {
    const QuantumChannel c = random_channel(2, 2, rng);
    const DensityOperator r = random_density(2, 2, rng);
    const DensityOperator s = random_density(2, 2, rng);
    const DpiCertificate cert = dpi_via_stinespring(r, s, c);
    CHECK(cert.holds);
    CHECK(cert.branch_coherent);
    CHECK(cert.trace_monotonicity_gap >= -1e-8);
  }
}

TEST_CASE("dpi certificate handles rank-deficient nested inputs") {
  CounterRng rng(48);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityOperator sigma = random_density(3, 2, rng);
    const DensityOperator rho = random_density_in_support(sigma, 1, rng);
    const QuantumChannel c = random_channel(3, 2, rng);
    const DpiCertificate cert = dpi_via_stinespring(rho, sigma, c);
    CHECK(cert.holds);
    CHECK(cert.input_entropy.value.is_finite());
  }
  // support violation: certificate is vacuous but branch-flagged
  const DpiCertificate infinite = dpi_via_stinespring(
      diag_state({0.5, 0.5}), diag_state({1.0, 0.0}), depolarizer());
  CHECK(infinite.holds);
  CHECK(infinite.input_entropy.value.is_plus_infinity());
}

TEST_CASE("property: Klein inequality with equality only at rho = sigma") {
  CounterRng rng(49);
  for (int trial = 0; trial < 50; ++trial) {
    const DensityOperator rho = random_density(3, 3, rng);
    const DensityOperator sigma = random_density(3, 3, rng);
    const RelEntropyResult result = relative_entropy_support(rho, sigma);
    CHECK(result.value.value() >= -1e-9);
    if (result.value.value() <= 1e-10)
      CHECK((rho.mat() - sigma.mat()).norm() <= 1e-7);
  }
}
