// Acceptance suite: one line per criterion, exit code = number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "relent/forms.hpp"
#include "relent/harness.hpp"

using namespace relent;

namespace {

int failures = 0;

void report(int index, const char* label, bool pass, const std::string& detail) {
  std::printf("[%2d] %-4s %-46s %s\n", index, pass ? "PASS" : "FAIL", label,
              detail.c_str());
  if (!pass) ++failures;
}

std::string fmt(const char* format, double a, double b = 0.0) {
  char buffer[160];
  std::snprintf(buffer, sizeof(buffer), format, a, b);
  return buffer;
}

// --- criterion 1: seeded DPI campaign -------------------------------------

void criterion_dpi_campaign() {
  const auto start = std::chrono::steady_clock::now();
  Campaign campaign;
  campaign.seed = 20250810;
  campaign.d_a_grid = {2, 3};
  campaign.d_b_grid = {2, 3};
  campaign.rank_modes = {"full", "deficient"};
  campaign.samples_per_cell = 1000;
  campaign.checks = {"dpi"};
  const Report r = run_campaign(campaign);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  double worst = -1.0;
  for (const CheckStats& c : r.checks) worst = std::max(worst, c.worst_defect);
  const bool pass = r.total_failures() == 0 && seconds <= 300.0;
  report(1, "DPI campaign 8x1000, tol 1e-8", pass,
         fmt("worst gap defect = %.3e, runtime = %.1fs", worst, seconds));
}

// --- criterion 2: isometry -------------------------------------------------

void criterion_isometry() {
  const BipartiteDims dims{2, 2};
  double worst_iso = 0.0, worst_bridge = 0.0;
  for (int i = 0; i < 500; ++i) {
    CounterRng rng = CounterRng::substream(77, "acceptance-isometry", i);
    const DensityOperator rho = random_density(4, 4, rng);
    const ReductionIsometry v = reduction_isometry(rho.op(), dims);
    worst_iso = std::max(worst_iso, v.isometry_defect);
    worst_bridge = std::max(worst_bridge, v.bridge_defect);
  }
  const bool pass = worst_iso <= 1e-9 && worst_bridge <= 1e-9;
  report(2, "isometry V'V = I and bridge, 500 samples", pass,
         fmt("max ||V'V-I|| = %.3e, max bridge = %.3e", worst_iso,
             worst_bridge));
}

// --- criterion 3: key operator inequality ----------------------------------

void criterion_key_inequality() {
  const BipartiteDims dims{2, 2};
  double worst = 1.0;
  for (int i = 0; i < 500; ++i) {
    CounterRng rng = CounterRng::substream(78, "acceptance-key", i);
    const DensityOperator rho = random_density(4, 4, rng);
    const DensityOperator sigma = random_density(4, 4, rng);
    const KeyInequalityCertificate cert =
        check_key_inequality(rho.op(), sigma.op(), dims, rng, 4);
    worst = std::min(worst, cert.loewner.min_eig);
  }
  report(3, "key inequality min eig >= -1e-9, 500 samples", worst >= -1e-9,
         fmt("min eig over samples = %.3e", worst));
}

// --- criterion 4: counterexample figures -----------------------------------

void criterion_counterexamples() {
  const auto inv = contractive_jensen_table(JensenVariant::shifted_inverse,
                                            0.5, 0.5, {1.0});
  const bool exact = std::abs(inv[0].lhs - 4.0 / 3.0) < 1e-15 &&
                     std::abs(inv[0].rhs - 1.0 / 6.0) < 1e-15 &&
                     std::abs((inv[0].lhs - inv[0].rhs) - 7.0 / 6.0) < 1e-15;

  const auto log_row =
      contractive_jensen_table(JensenVariant::negative_log, 0.5, 0.0, {1.0});
  const bool log_exact = std::abs(log_row[0].lhs - std::log(4.0)) < 1e-15 &&
                         log_row[0].rhs == 0.0;

  bool all_violate = true;
  for (const auto& row : contractive_jensen_table(
           JensenVariant::shifted_inverse, 0.5, 0.5, default_figure_grid()))
    all_violate = all_violate && row.violation;
  for (const auto& row : contractive_jensen_table(
           JensenVariant::negative_log, 0.5, 0.0, default_figure_grid()))
    all_violate = all_violate && row.violation;

  report(4, "counterexample figures, exact values", exact && log_exact &&
             all_violate,
         fmt("x=1: lhs-rhs = %.15f (7/6), log lhs = %.6f", inv[0].lhs - inv[0].rhs,
             log_row[0].lhs));
}

// --- criterion 5: definition equivalence -----------------------------------

void criterion_equivalence() {
  const auto schedule = default_eps_schedule();  // ends at eps = 1e-8
  // At fixed eps the regularized trace deviates from the limit by about
  // eps * Tr(rho sigma_+^{-1}), so the sampled positive spectra stay above
  // a floor that keeps that deviation inside the tolerance.
  constexpr double spectral_floor = 2e-3;
  auto floored = [](DensityOperator state, int rank, auto redraw) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const RealVector eigs = eig_hermitian(state.op()).eigenvalues;
      if (eigs[eigs.size() - rank] >= spectral_floor) return state;
      state = redraw();
    }
    return state;
  };

  double worst_rel = 0.0;
  long incoherent = 0;
  long sampled = 0;
  for (int d : {2, 3, 4}) {
    for (int r_rho = 1; r_rho <= d; ++r_rho) {
      for (int r_sigma = 1; r_sigma <= d; ++r_sigma) {
        for (int i = 0; i < 200; ++i) {
          CounterRng rng = CounterRng::substream(
              79, "acceptance-equivalence",
              static_cast<std::uint64_t>(((d * 8 + r_rho) * 8 + r_sigma)) *
                      100000 +
                  i);
          const DensityOperator sigma =
              floored(random_density(d, r_sigma, rng), r_sigma,
                      [&] { return random_density(d, r_sigma, rng); });
          const DensityOperator rho =
              (i % 2 == 0 && r_rho <= r_sigma)
                  ? floored(random_density_in_support(sigma, r_rho, rng),
                            r_rho,
                            [&] {
                              return random_density_in_support(sigma, r_rho,
                                                               rng);
                            })
                  : floored(random_density(d, r_rho, rng), r_rho, [&] {
                      return random_density(d, r_rho, rng);
                    });
          const RelEntropyResult support = relative_entropy_support(rho, sigma);
          const RegularizedRelEntropy reg =
              relative_entropy_regularized(rho, sigma, schedule);
          ++sampled;
          if (support.value.is_finite() == reg.divergent) {
            ++incoherent;
            continue;
          }
          if (support.value.is_finite()) {
            const double s = support.value.value();
            worst_rel = std::max(worst_rel, std::abs(s - reg.values.back()) /
                                                (1.0 + std::abs(s)));
          }
        }
      }
    }
  }
  const bool pass = incoherent == 0 && worst_rel <= 1e-5;
  report(5, "support vs regularized, 200/rank combo", pass,
         fmt("worst relative defect = %.3e, incoherent = %.0f", worst_rel,
             static_cast<double>(incoherent)));
}

// --- criterion 6: four-method agreement ------------------------------------

void criterion_four_methods() {
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    CounterRng rng = CounterRng::substream(80, "acceptance-methods", i);
    const int d = 2 + static_cast<int>(rng.uniform_int(3));
    const DensityOperator rho = random_density(d, d, rng);
    const DensityOperator sigma = random_density(d, d, rng);
    const Matrix id = Matrix::Identity(d, d);

    const double support = relative_entropy_support(rho, sigma).value.value();
    const double regularized =
        relative_entropy_regularized(rho, sigma, deep_eps_schedule())
            .limit_estimate;
    const double modular = entropy_via_modular(rho.op(), sigma.op());
    const double form =
        entropy_form(rho, sigma, id, id, default_t_schedule()).value.value();

    const double spread =
        std::max({support, regularized, modular, form}) -
        std::min({support, regularized, modular, form});
    worst = std::max(worst, spread);
  }
  report(6, "four-method agreement, 200 full-rank pairs", worst <= 1e-7,
         fmt("worst spread = %.3e", worst));
}

// --- criterion 7: interpolation structure theorems --------------------------

void criterion_uhlmann_structure() {
  double worst_indep = 0.0;
  long domination_violations = 0;
  long maximality_failures = 0;
  for (int i = 0; i < 100; ++i) {
    CounterRng rng = CounterRng::substream(81, "acceptance-structure", i);
    const int n = 4 * (1 + static_cast<int>(rng.uniform_int(4)));  // 4..16
    const int rank_a = 1 + static_cast<int>(rng.uniform_int(n));
    const int rank_b = 1 + static_cast<int>(rng.uniform_int(n));
    const Matrix ga = random_ginibre(n, rank_a, rng);
    const Matrix gb = random_ginibre(n, rank_b, rng);
    const PositiveForm alpha(ga * ga.adjoint());
    const PositiveForm beta(gb * gb.adjoint());

    worst_indep = std::max(worst_indep, check_representation_independence(
                                            alpha, beta, 0.3, 3, rng));
    domination_violations +=
        check_geometric_mean_domination(alpha, beta, 1000, rng).violations;
    maximality_failures +=
        check_geometric_mean_maximality(alpha, beta, 100, rng).failures;
  }

  long grid_violations = 0;
  for (int i = 0; i < 200; ++i) {
    CounterRng rng = CounterRng::substream(82, "acceptance-grid", i);
    const int n = 2 + static_cast<int>(rng.uniform_int(15));  // 2..16
    const Matrix ga = random_ginibre(n, n, rng);
    const Matrix gb = random_ginibre(n, n, rng);
    const PositiveForm alpha(ga * ga.adjoint());
    const PositiveForm beta(gb * gb.adjoint());

    // ordered minorants via PSD compression
    auto compress = [&](const PositiveForm& f) {
      const Matrix s =
          sqrt_psd(HermitianOperator::symmetrized(f.gram())).mat();
      const Matrix u = random_unitary(n, rng);
      RealVector d(n);
      for (int k = 0; k < n; ++k) d[k] = rng.uniform();
      return PositiveForm(
          s * u * d.asDiagonal().toDenseMatrix().cast<Complex>() *
          u.adjoint() * s);
    };
    if (!check_interpolation_monotonicity(compress(alpha), alpha,
                                          compress(beta), beta, dyadic_grid(8))
             .holds)
      ++grid_violations;

    const int m = 1 + static_cast<int>(rng.uniform_int(n));
    const Matrix psi = random_ginibre(n, m, rng);
    if (!check_pullback_inequality(psi, alpha, beta, dyadic_grid(8)).holds)
      ++grid_violations;
  }

  const bool pass = worst_indep <= 1e-8 && domination_violations == 0 &&
                    maximality_failures == 0 && grid_violations == 0;
  report(7, "interpolation structure theorems", pass,
         fmt("worst rep discrepancy = %.3e, grid violations = %.0f",
             worst_indep, static_cast<double>(grid_violations)));
}

// --- criterion 8: non-invertible coverage -----------------------------------

void criterion_noninvertible() {
  const BipartiteDims dims{2, 2};
  std::vector<double> grid;
  for (int k = 1; k <= 7; ++k) grid.push_back(k / 8.0);
  const auto eps = default_eps_schedule();

  long uhlmann_failures = 0;
  long petz_failures = 0;
  double worst_limit_defect = 0.0;
  for (int i = 0; i < 200; ++i) {
    CounterRng rng = CounterRng::substream(83, "acceptance-noninvertible", i);
    const int r_sigma = 2 + static_cast<int>(rng.uniform_int(2));  // 2..3
    const DensityOperator sigma = random_density(4, r_sigma, rng);
    const DensityOperator rho = random_density_in_support(
        sigma, 1 + static_cast<int>(rng.uniform_int(r_sigma)), rng);

    const UhlmannCertificate u = uhlmann_monotonicity(rho, sigma, dims, grid);
    if (!u.holds) ++uhlmann_failures;

    const MonotonicityCertificate p =
        corrected_monotonicity(rho, sigma, dims, eps);
    if (!(p.holds && p.regularized)) ++petz_failures;
    worst_limit_defect = std::max(
        worst_limit_defect,
        std::max(p.limit_defect_joint /
                     (1.0 + std::abs(p.s_joint.value.is_finite()
                                         ? p.s_joint.value.value()
                                         : 0.0)),
                 p.limit_defect_reduced /
                     (1.0 + std::abs(p.s_reduced.value.is_finite()
                                         ? p.s_reduced.value.value()
                                         : 0.0))));
  }
  const bool pass = uhlmann_failures == 0 && petz_failures == 0 &&
                    worst_limit_defect <= 1e-5;
  report(8, "rank-deficient chains, 200 nested pairs", pass,
         fmt("worst limit defect = %.3e, chain failures = %.0f",
             worst_limit_defect,
             static_cast<double>(uhlmann_failures + petz_failures)));
}

// --- criterion 9: Petz recovery ---------------------------------------------

void criterion_recovery() {
  double worst_identity = 0.0;
  for (int i = 0; i < 100; ++i) {
    CounterRng rng = CounterRng::substream(84, "acceptance-recovery", i);
    const int d = 2 + static_cast<int>(rng.uniform_int(2));
    const DensityOperator sigma = random_density(d, d, rng);
    const QuantumChannel c =
        random_channel(d, 1 + static_cast<int>(rng.uniform_int(3)), rng);
    worst_identity = std::max(worst_identity, recovery_identity_defect(sigma, c));
  }

  double worst_factorization = 0.0;
  const BipartiteDims dims{2, 2};
  for (int i = 0; i < 100; ++i) {
    CounterRng rng = CounterRng::substream(85, "acceptance-factorization", i);
    const DensityOperator sigma = random_density(4, 4, rng);
    worst_factorization = std::max(
        worst_factorization, reduction_isometry_factorization_defect(sigma, dims));
  }
  const bool pass = worst_identity <= 1e-9 && worst_factorization <= 1e-9;
  report(9, "Petz recovery identity and factorization", pass,
         fmt("max recovery defect = %.3e, max factorization = %.3e",
             worst_identity, worst_factorization));
}

// --- criterion 10: Fawzi-Renner ----------------------------------------------

void criterion_fawzi_renner() {
  double worst_slack = 1.0;
  for (int i = 0; i < 200; ++i) {
    CounterRng rng = CounterRng::substream(86, "acceptance-fawzi-renner", i);
    const DensityOperator rho = random_density(2, 2, rng);
    const DensityOperator sigma = random_density(2, 2, rng);
    const QuantumChannel c =
        random_channel(2, 1 + static_cast<int>(rng.uniform_int(3)), rng);
    const FawziRennerCertificate cert = fawzi_renner_check(rho, sigma, c);
    worst_slack = std::min(worst_slack, cert.slack);
  }
  report(10, "Fawzi-Renner bound, 200 qubit triples", worst_slack >= -1e-7,
         fmt("min slack = %.3e", worst_slack));
}

}  // namespace

int main() {
  criterion_dpi_campaign();
  criterion_isometry();
  criterion_key_inequality();
  criterion_counterexamples();
  criterion_equivalence();
  criterion_four_methods();
  criterion_uhlmann_structure();
  criterion_noninvertible();
  criterion_recovery();
  criterion_fawzi_renner();
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures;
}
