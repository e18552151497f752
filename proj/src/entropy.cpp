#include "relent/entropy.hpp"

#include <cmath>

namespace relent {

namespace {

// Neville extrapolation of the last few (eps, value) points to eps = 0.
double extrapolate_to_zero(const std::vector<double>& eps,
                           const std::vector<double>& values) {
  const std::size_t points = std::min<std::size_t>(3, values.size());
  const std::size_t offset = values.size() - points;
  std::vector<double> x(eps.end() - static_cast<long>(points), eps.end());
  std::vector<double> p(values.begin() + static_cast<long>(offset),
                        values.end());
  for (std::size_t level = 1; level < points; ++level)
    for (std::size_t i = 0; i + level < points; ++i)
      p[i] = (x[i + level] * p[i] - x[i] * p[i + 1]) / (x[i + level] - x[i]);
  return p[0];
}

}  // namespace

RelEntropyResult relative_entropy_support(const DensityOperator& rho,
                                          const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim())
    throw DimensionError("relative_entropy_support: dimension mismatch");

  RelEntropyResult result;
  result.support_overlap = support_overlap_norm(rho, sigma);
  if (result.support_overlap > 1e-7) {
    result.branch = EntropyBranch::infinite_support_violation;
    result.value = ExtendedReal::plus_infinity();
    return result;
  }

  const SpectralDecomposition sr = eig_hermitian(rho.op());
  const SpectralDecomposition ss = eig_hermitian(sigma.op());
  const double tau_r = support_threshold(sr.eigenvalues);
  const double tau_s = support_threshold(ss.eigenvalues);

  // overlaps |<x_j, y_k>|^2
  const Matrix cross = sr.eigenvectors.adjoint() * ss.eigenvectors;

  double s = 0.0;
  for (Eigen::Index j = 0; j < sr.eigenvalues.size(); ++j) {
    const double lambda = sr.eigenvalues[j];
    if (lambda <= tau_r) continue;
    double log_sigma_weight = 0.0;
    for (Eigen::Index k = 0; k < ss.eigenvalues.size(); ++k) {
      const double mu = ss.eigenvalues[k];
      if (mu <= tau_s) continue;
      log_sigma_weight += std::log(mu) * std::norm(cross(j, k));
    }
    s += lambda * (std::log(lambda) - log_sigma_weight);
  }
  result.value = ExtendedReal::finite(s);
  result.branch = EntropyBranch::finite;
  return result;
}

RegularizedRelEntropy relative_entropy_regularized(
    const DensityOperator& rho, const DensityOperator& sigma,
    const std::vector<double>& eps_schedule) {
  if (rho.dim() != sigma.dim())
    throw DimensionError("relative_entropy_regularized: dimension mismatch");
  validate_eps_schedule(eps_schedule);

  const SpectralDecomposition sr = eig_hermitian(rho.op());
  const SpectralDecomposition ss = eig_hermitian(sigma.op());
  const Matrix cross = sr.eigenvectors.adjoint() * ss.eigenvectors;
  const Eigen::Index d = rho.dim();

  // weights <y_k| rho |y_k> = sum_j lambda_j |<x_j, y_k>|^2
  RealVector sigma_basis_weights = RealVector::Zero(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    double w = 0.0;
    for (Eigen::Index j = 0; j < d; ++j)
      w += std::max(sr.eigenvalues[j], 0.0) * std::norm(cross(j, k));
    sigma_basis_weights[k] = w;
  }

  RegularizedRelEntropy out;
  out.eps = eps_schedule;
  for (double eps : eps_schedule) {
    // rho_eps and sigma_eps share the unregularized eigenvectors, so both
    // traces reduce to exact scalar sums over shifted spectra.
    double first = 0.0;  // Tr(rho_eps log rho_eps)
    for (Eigen::Index j = 0; j < d; ++j) {
      const double shifted = std::max(sr.eigenvalues[j], 0.0) + eps;
      first += shifted * std::log(shifted);
    }
    double second = 0.0;  // Tr(rho_eps log sigma_eps)
    for (Eigen::Index k = 0; k < d; ++k) {
      const double shifted = std::max(ss.eigenvalues[k], 0.0) + eps;
      second += (sigma_basis_weights[k] + eps) * std::log(shifted);
    }
    out.values.push_back(first - second);
  }

  // On the divergent branch the sequence grows like alpha * |log eps| with a
  // persistent slope alpha; on the finite branch the slope decays with eps.
  // The tail slope estimates alpha, and the decay ratio of the last two
  // slopes separates a small genuine alpha from a finite-branch transient.
  auto two_point_slope = [&](std::size_t i) {
    return (out.values[i] - out.values[i - 1]) /
           (std::log(eps_schedule[i - 1]) - std::log(eps_schedule[i]));
  };
  const std::size_t count = out.values.size();
  out.slope = count >= 2 ? two_point_slope(count - 1) : 0.0;
  if (count >= 3) {
    const double previous = two_point_slope(count - 2);
    out.divergent = out.slope > tolerances().divergence_slope ||
                    (out.slope > 1e-8 && out.slope > 0.4 * previous);
  } else {
    out.divergent = out.slope > tolerances().divergence_slope;
  }
  out.limit = out.divergent ? ExtendedReal::plus_infinity()
                            : ExtendedReal::finite(out.values.back());
  out.limit_estimate = out.divergent
                           ? 0.0
                           : extrapolate_to_zero(eps_schedule, out.values);
  return out;
}

std::vector<double> deep_eps_schedule() {
  std::vector<double> eps;
  for (int k = 0; k <= 10; ++k) eps.push_back(std::pow(10.0, -2.0 - k));
  return eps;
}

UnitaryInvarianceCheck check_unitary_invariance(const DensityOperator& rho,
                                                const DensityOperator& sigma,
                                                const Matrix& u) {
  if (u.rows() != rho.dim() || u.cols() != rho.dim())
    throw DimensionError("check_unitary_invariance: dimension mismatch");
  const double unitarity =
      (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
  if (unitarity > 1e-10)
    throw DomainError("check_unitary_invariance: U not unitary, defect " +
                      std::to_string(unitarity));

  const DensityOperator rho_u(
      HermitianOperator::symmetrized(u * rho.mat() * u.adjoint()));
  const DensityOperator sigma_u(
      HermitianOperator::symmetrized(u * sigma.mat() * u.adjoint()));

  const RelEntropyResult before = relative_entropy_support(rho, sigma);
  const RelEntropyResult after = relative_entropy_support(rho_u, sigma_u);

  UnitaryInvarianceCheck check;
  check.branches_match = before.branch == after.branch;
  check.defect = (before.value.is_finite() && after.value.is_finite())
                     ? std::abs(before.value.value() - after.value.value())
                     : 0.0;
  return check;
}

double check_additivity(const DensityOperator& rho1,
                        const DensityOperator& sigma1,
                        const DensityOperator& rho2,
                        const DensityOperator& sigma2) {
  if (rho1.dim() * rho2.dim() > 16)
    throw DimensionError("check_additivity: product dimension above 16");

  const DensityOperator rho12(
      HermitianOperator::symmetrized(kron(rho1.mat(), rho2.mat())));
  const DensityOperator sigma12(
      HermitianOperator::symmetrized(kron(sigma1.mat(), sigma2.mat())));

  const RelEntropyResult s1 = relative_entropy_support(rho1, sigma1);
  const RelEntropyResult s2 = relative_entropy_support(rho2, sigma2);
  const RelEntropyResult s12 = relative_entropy_support(rho12, sigma12);

  const bool factor_infinite =
      !s1.value.is_finite() || !s2.value.is_finite();
  if (factor_infinite || !s12.value.is_finite()) {
    if (factor_infinite && !s12.value.is_finite()) return 0.0;
    throw OrderError("check_additivity: incoherent infinite branches");
  }
  return std::abs(s12.value.value() - s1.value.value() - s2.value.value());
}

DpiCertificate dpi_via_stinespring(const DensityOperator& rho,
                                   const DensityOperator& sigma,
                                   const QuantumChannel& c) {
  DpiCertificate cert;
  cert.input_entropy = relative_entropy_support(rho, sigma);

  const DensityOperator c_rho = apply_channel(c, rho);
  const DensityOperator c_sigma = apply_channel(c, sigma);
  cert.output_entropy = relative_entropy_support(c_rho, c_sigma);

  // Direct inequality.
  if (!cert.input_entropy.value.is_finite()) {
    cert.holds = true;
    cert.gap = 0.0;
    cert.branch_coherent = true;
  } else if (!cert.output_entropy.value.is_finite()) {
    cert.holds = false;
    cert.gap = 0.0;
    cert.branch_coherent = false;  // impossible for a genuine channel
  } else {
    cert.gap =
        cert.input_entropy.value.value() - cert.output_entropy.value.value();
    cert.holds = cert.gap >= -tolerances().dpi_gap;
  }

  // Chain replay on the dilation.
  const StinespringDilation dil = stinespring_dilate(c);
  cert.dilation_defect = dil.roundtrip_defect;

  const DensityOperator rho_lift(
      HermitianOperator::symmetrized(dil.lift(rho.mat())));
  const DensityOperator sigma_lift(
      HermitianOperator::symmetrized(dil.lift(sigma.mat())));
  const RelEntropyResult s_lift = relative_entropy_support(rho_lift, sigma_lift);

  // Dilated compression reproduces the channel outputs.
  cert.dilation_defect = std::max(
      cert.dilation_defect,
      std::max(
          (partial_trace_b(rho_lift.mat(), dil.dims()) - c_rho.mat()).norm(),
          (partial_trace_b(sigma_lift.mat(), dil.dims()) - c_sigma.mat())
              .norm()));

  // Partial-trace monotonicity link: S(Tr_env lift) <= S(lift).
  if (s_lift.value.is_finite() && cert.output_entropy.value.is_finite())
    cert.trace_monotonicity_gap =
        s_lift.value.value() - cert.output_entropy.value.value();
  else if (!s_lift.value.is_finite())
    cert.trace_monotonicity_gap = 0.0;  // +inf dominates any reduced value

  // Unitary invariance: S(lift) = S(rho (x) e00 || sigma (x) e00).
  const DensityOperator env = dil.env_state();
  const DensityOperator rho_prod(
      HermitianOperator::symmetrized(kron(rho.mat(), env.mat())));
  const DensityOperator sigma_prod(
      HermitianOperator::symmetrized(kron(sigma.mat(), env.mat())));
  const RelEntropyResult s_prod = relative_entropy_support(rho_prod, sigma_prod);
  if (s_lift.value.is_finite() && s_prod.value.is_finite())
    cert.unitary_invariance_defect =
        std::abs(s_lift.value.value() - s_prod.value.value());
  else if (s_lift.value.is_finite() != s_prod.value.is_finite())
    cert.branch_coherent = false;

  // Additivity with the pure reference state: S(prod) = S(rho || sigma).
  if (s_prod.value.is_finite() && cert.input_entropy.value.is_finite())
    cert.additivity_defect =
        std::abs(s_prod.value.value() - cert.input_entropy.value.value());
  else if (s_prod.value.is_finite() != cert.input_entropy.value.is_finite())
    cert.branch_coherent = false;

  return cert;
}

}  // namespace relent
