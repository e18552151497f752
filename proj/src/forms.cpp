#include "relent/forms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace relent {

namespace {

// 0^s := 0 for s in (0, 1], 0^0 := 1; negative roundoff clamped away.
double power_convention(double base, double expo) {
  if (expo == 0.0) return 1.0;
  if (base <= 0.0) return 0.0;
  return std::pow(base, expo);
}

Matrix matrix_power_psd(const HermitianOperator& m, double expo) {
  const SpectralDecomposition sd = eig_hermitian(m);
  RealVector vals(sd.eigenvalues.size());
  const double tau = support_threshold(sd.eigenvalues);
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    vals[i] = power_convention(sd.eigenvalues[i] > tau ? sd.eigenvalues[i] : 0.0,
                               expo);
  return sd.eigenvectors * vals.asDiagonal().toDenseMatrix().cast<Complex>() *
         sd.eigenvectors.adjoint();
}

// Joint eigenbasis of a commuting Hermitian pair: eigendecompose A, then
// diagonalize B inside each eigenvalue cluster of A.
struct JointDiagonalization {
  Matrix basis;       // unitary columns
  RealVector a_vals;
  RealVector b_vals;
};

JointDiagonalization simultaneous_diagonalize(const Matrix& a,
                                              const Matrix& b) {
  const SpectralDecomposition sa =
      eig_hermitian(HermitianOperator::symmetrized(a));
  const Eigen::Index n = sa.eigenvalues.size();

  JointDiagonalization jd;
  jd.basis = sa.eigenvectors;
  jd.a_vals = sa.eigenvalues;
  jd.b_vals = RealVector::Zero(n);

  const double span =
      n ? std::max(1.0, sa.eigenvalues.maxCoeff() - sa.eigenvalues.minCoeff())
        : 1.0;
  const double tau = tolerances().cluster_rel * span;

  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && sa.eigenvalues[j + 1] - sa.eigenvalues[i] <= tau) ++j;
    const Eigen::Index width = j - i + 1;
    const Matrix block = jd.basis.middleCols(i, width);
    const Matrix restricted = block.adjoint() * b * block;
    const SpectralDecomposition sb =
        eig_hermitian(HermitianOperator::symmetrized(restricted));
    jd.basis.middleCols(i, width) = block * sb.eigenvectors;
    jd.b_vals.segment(i, width) = sb.eigenvalues;
    i = j + 1;
  }
  return jd;
}

void require_same_dim(const PositiveForm& a, const PositiveForm& b,
                      const char* where) {
  if (a.dim() != b.dim())
    throw DimensionError(std::string(where) + ": form dimensions differ");
}

// Tr(rho^{1-t} sigma^t) with kernel conventions, via the eigenbases.
double interpolation_trace(const SpectralDecomposition& sr,
                           const SpectralDecomposition& ss,
                           const Eigen::MatrixXd& overlaps_sq, double t) {
  const double tau_r = support_threshold(sr.eigenvalues);
  const double tau_s = support_threshold(ss.eigenvalues);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < sr.eigenvalues.size(); ++j) {
    const double lam = sr.eigenvalues[j] > tau_r ? sr.eigenvalues[j] : 0.0;
    const double lam_pow = power_convention(lam, 1.0 - t);
    if (lam_pow == 0.0) continue;
    for (Eigen::Index k = 0; k < ss.eigenvalues.size(); ++k) {
      const double mu = ss.eigenvalues[k] > tau_s ? ss.eigenvalues[k] : 0.0;
      const double mu_pow = power_convention(mu, t);
      if (mu_pow == 0.0) continue;
      acc += lam_pow * mu_pow * overlaps_sq(j, k);
    }
  }
  return acc;
}

}  // namespace

OperatorBasis OperatorBasis::matrix_units(int d) {
  OperatorBasis basis;
  basis.op_dim = d;
  basis.elements.reserve(static_cast<std::size_t>(d) * d);
  // vec index j*d + i carries E_{ij}
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      Matrix e = Matrix::Zero(d, d);
      e(i, j) = 1.0;
      basis.elements.push_back(std::move(e));
    }
  return basis;
}

double OperatorBasis::orthonormality_defect() const {
  const std::size_t n = elements.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Complex g = (elements[i].adjoint() * elements[j]).trace();
      const double expected = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(g - expected));
    }
  return worst;
}

PositiveForm::PositiveForm(Matrix gram) {
  if (gram.rows() != gram.cols())
    throw DimensionError("PositiveForm: Gram matrix must be square");
  HermitianOperator h = HermitianOperator::symmetrized(std::move(gram));
  const SpectralDecomposition sd = eig_hermitian(h);
  const double tau = support_threshold(sd.eigenvalues);
  const double min_eig = sd.eigenvalues.size() ? sd.eigenvalues.minCoeff() : 0.0;
  psd_defect_ = std::max(0.0, -min_eig);
  if (min_eig < -tau) {
    std::ostringstream os;
    os << "PositiveForm: Gram matrix not PSD, lambda_min = " << min_eig;
    throw OrderError(os.str());
  }
  gram_ = h.mat();
}

Complex PositiveForm::operator()(const Vector& v, const Vector& w) const {
  if (v.size() != dim() || w.size() != dim())
    throw DimensionError("PositiveForm: probe dimension mismatch");
  return (v.adjoint() * gram_ * w)(0, 0);
}

double PositiveForm::diagonal(const Vector& v) const {
  return (*this)(v, v).real();
}

double PositiveForm::kernel_isotropy_defect() const {
  const SpectralDecomposition sd =
      eig_hermitian(HermitianOperator::symmetrized(gram_));
  const double tau = support_threshold(sd.eigenvalues);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
    if (sd.eigenvalues[i] <= tau) {
      const Vector v = sd.eigenvectors.col(i);
      worst = std::max(worst, std::abs((*this)(v, v)));
    }
  }
  return worst;
}

PositiveForm form_from_operator_pair(const DensityOperator& state,
                                     MulSide side,
                                     const OperatorBasis& basis) {
  if (basis.op_dim != state.dim())
    throw DimensionError("form_from_operator_pair: basis/state mismatch");
  if (basis.orthonormality_defect() > 1e-10)
    throw DomainError("form_from_operator_pair: basis not orthonormal");

  const std::size_t n = basis.elements.size();
  Matrix gram(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Matrix& ei = basis.elements[i];
      const Matrix& ej = basis.elements[j];
      gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          side == MulSide::left
              ? (ei.adjoint() * state.mat() * ej).trace()
              : (state.mat() * ei.adjoint() * ej).trace();
    }
  return PositiveForm(std::move(gram));
}

PositiveForm form_from_operator_pair(const DensityOperator& state,
                                     MulSide side) {
  const Eigen::Index d = state.dim();
  const Matrix id = Matrix::Identity(d, d);
  Matrix gram = side == MulSide::left ? kron(id, state.mat())
                                      : kron(state.mat().transpose(), id);
  return PositiveForm(std::move(gram));
}

double FormRepresentation::reproduction_defect(const PositiveForm& form) const {
  return (h.adjoint() * op * h - form.gram()).norm();
}

FormRepresentation CompatiblePair::rep_alpha() const {
  return FormRepresentation{static_cast<int>(h.rows()), h, a_op};
}

FormRepresentation CompatiblePair::rep_beta() const {
  return FormRepresentation{static_cast<int>(h.rows()), h, b_op};
}

CompatiblePair build_compatible_pair(const PositiveForm& alpha,
                                     const PositiveForm& beta) {
  require_same_dim(alpha, beta, "build_compatible_pair");
  const Matrix sum = alpha.gram() + beta.gram();
  const SpectralDecomposition sd =
      eig_hermitian(HermitianOperator::symmetrized(sum));
  const double tau = support_threshold(sd.eigenvalues);

  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i)
    if (sd.eigenvalues[i] > tau) kept.push_back(i);
  if (kept.empty())
    throw DomainError("build_compatible_pair: alpha + beta vanishes");

  const Eigen::Index r = static_cast<Eigen::Index>(kept.size());
  Matrix u(sd.eigenvectors.rows(), r);
  RealVector d(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    u.col(i) = sd.eigenvectors.col(kept[i]);
    d[i] = sd.eigenvalues[kept[i]];
  }

  RealVector sqrt_d(r), inv_sqrt_d(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    sqrt_d[i] = std::sqrt(d[i]);
    inv_sqrt_d[i] = 1.0 / sqrt_d[i];
  }

  CompatiblePair pair;
  pair.h = sqrt_d.asDiagonal().toDenseMatrix().cast<Complex>() * u.adjoint();
  const Matrix w_inv =
      inv_sqrt_d.asDiagonal().toDenseMatrix().cast<Complex>() * u.adjoint();
  pair.a_op = w_inv * alpha.gram() * w_inv.adjoint();
  pair.a_op = 0.5 * (pair.a_op + pair.a_op.adjoint());
  pair.b_op = Matrix::Identity(r, r) - pair.a_op;

  pair.commutator_norm = (pair.a_op * pair.b_op - pair.b_op * pair.a_op).norm();
  pair.unit_sum_defect =
      (pair.a_op + pair.b_op - Matrix::Identity(r, r)).norm();
  pair.reproduction_defect_alpha = pair.rep_alpha().reproduction_defect(alpha);
  pair.reproduction_defect_beta = pair.rep_beta().reproduction_defect(beta);

  const Tolerances& tol = tolerances();
  const double scale = 1.0 + sum.norm();
  if (pair.commutator_norm > tol.form_reproduction * scale ||
      pair.unit_sum_defect > tol.form_reproduction * scale ||
      pair.reproduction_defect_alpha > tol.form_reproduction * scale ||
      pair.reproduction_defect_beta > tol.form_reproduction * scale)
    throw ConvergenceError("build_compatible_pair: construction defects exceed tolerance");
  return pair;
}

CompatiblePair rotate_pair(const CompatiblePair& pair, const Matrix& q) {
  if (q.rows() != pair.h.rows() || q.cols() != pair.h.rows())
    throw DimensionError("rotate_pair: rotation does not match quotient");
  CompatiblePair out = pair;
  out.h = q * pair.h;
  out.a_op = q * pair.a_op * q.adjoint();
  out.b_op = q * pair.b_op * q.adjoint();
  return out;
}

CompatiblePair scale_pair(const CompatiblePair& pair, double c) {
  if (!(c > 0)) throw DomainError("scale_pair: factor must be positive");
  CompatiblePair out = pair;
  out.h = c * pair.h;
  out.a_op = pair.a_op / (c * c);
  out.b_op = pair.b_op / (c * c);
  return out;
}

PositiveForm interpolate(const CompatiblePair& pair, double t) {
  if (t < 0.0 || t > 1.0)
    throw DomainError("interpolate: t must lie in [0, 1]");
  const JointDiagonalization jd =
      simultaneous_diagonalize(pair.a_op, pair.b_op);
  // Numerical kernel eigenvalues must become exact zeros before powering:
  // roundoff-sized values raised to fractional exponents are not small.
  const double tau_a = support_threshold(jd.a_vals);
  const double tau_b = support_threshold(jd.b_vals);
  RealVector f(jd.a_vals.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double a = jd.a_vals[i] > tau_a ? jd.a_vals[i] : 0.0;
    const double b = jd.b_vals[i] > tau_b ? jd.b_vals[i] : 0.0;
    f[i] = power_convention(a, 1.0 - t) * power_convention(b, t);
  }
  const Matrix middle = jd.basis *
                        f.asDiagonal().toDenseMatrix().cast<Complex>() *
                        jd.basis.adjoint();
  return PositiveForm(pair.h.adjoint() * middle * pair.h);
}

PositiveForm interpolate(const PositiveForm& alpha, const PositiveForm& beta,
                         double t) {
  return interpolate(build_compatible_pair(alpha, beta), t);
}

PositiveForm interpolate_states_direct(const DensityOperator& rho,
                                       const DensityOperator& sigma,
                                       double t) {
  if (t < 0.0 || t > 1.0)
    throw DomainError("interpolate_states_direct: t must lie in [0, 1]");
  const Matrix rho_pow = matrix_power_psd(rho.op(), 1.0 - t);
  const Matrix sigma_pow = matrix_power_psd(sigma.op(), t);
  return PositiveForm(kron(sigma_pow.transpose(), rho_pow));
}

double check_representation_independence(const PositiveForm& alpha,
                                         const PositiveForm& beta, double t,
                                         int rep_count, CounterRng& rng) {
  if (rep_count < 2)
    throw DomainError("check_representation_independence: need >= 2 reps");
  const CompatiblePair base = build_compatible_pair(alpha, beta);

  std::vector<Matrix> grams;
  grams.push_back(interpolate(base, t).gram());
  for (int i = 1; i < rep_count; ++i) {
    CompatiblePair variant =
        (i == 1) ? scale_pair(base, rng.uniform(0.3, 3.0))
                 : rotate_pair(base, random_unitary(
                                         static_cast<int>(base.h.rows()), rng));
    grams.push_back(interpolate(variant, t).gram());
  }

  double worst = 0.0;
  for (std::size_t i = 0; i < grams.size(); ++i)
    for (std::size_t j = i + 1; j < grams.size(); ++j)
      worst = std::max(worst, (grams[i] - grams[j]).norm());
  return worst;
}

double interpolation_composition_defect(const PositiveForm& alpha,
                                        const PositiveForm& beta, double t1,
                                        double t2, double t) {
  const PositiveForm gamma1 = interpolate(alpha, beta, t1);
  const PositiveForm gamma2 = interpolate(alpha, beta, t2);
  const PositiveForm nested = interpolate(gamma1, gamma2, t);
  const double t_prime = t1 * (1.0 - t) + t2 * t;
  const PositiveForm direct = interpolate(alpha, beta, t_prime);
  return (nested.gram() - direct.gram()).norm();
}

PositiveForm geometric_mean(const PositiveForm& alpha,
                            const PositiveForm& beta) {
  return interpolate(alpha, beta, 0.5);
}

DominationReport check_geometric_mean_domination(const PositiveForm& alpha,
                                                 const PositiveForm& beta,
                                                 int probes, CounterRng& rng) {
  const PositiveForm gm = geometric_mean(alpha, beta);
  const int n = alpha.dim();

  DominationReport report;
  report.probes = probes;
  report.worst_margin = -std::numeric_limits<double>::infinity();
  const double slack =
      tolerances().domination_slack * (1.0 + alpha.gram().norm()) *
      (1.0 + beta.gram().norm());
  for (int p = 0; p < probes; ++p) {
    const Vector v = vec(random_ginibre(n, 1, rng));
    const Vector w = vec(random_ginibre(n, 1, rng));
    const double lhs = std::norm(gm(v, w));
    const double rhs = alpha.diagonal(v) * beta.diagonal(w);
    report.worst_margin = std::max(report.worst_margin, lhs - rhs);
    if (lhs > rhs + slack) ++report.violations;
  }
  return report;
}

namespace {

Matrix pinv_sqrt_psd(const Matrix& gram) {
  const SpectralDecomposition sd =
      eig_hermitian(HermitianOperator::symmetrized(gram));
  const double tau = support_threshold(sd.eigenvalues);
  RealVector vals(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    vals[i] = sd.eigenvalues[i] > tau ? 1.0 / std::sqrt(sd.eigenvalues[i]) : 0.0;
  return sd.eigenvectors * vals.asDiagonal().toDenseMatrix().cast<Complex>() *
         sd.eigenvectors.adjoint();
}

// Exact domination test: C = sqrt(G_alpha) K sqrt(G_beta) with ||K|| <= 1
// and the supports aligned.
bool dominated_exactly(const Matrix& candidate, const PositiveForm& alpha,
                       const PositiveForm& beta) {
  const Matrix pa = pinv_sqrt_psd(alpha.gram());
  const Matrix pb = pinv_sqrt_psd(beta.gram());
  const Matrix k = pa * candidate * pb;
  const double slack = 1e-9;

  const HermitianOperator sa = HermitianOperator::symmetrized(alpha.gram());
  const HermitianOperator sb = HermitianOperator::symmetrized(beta.gram());
  const Matrix proj_a = support_projector(sa).mat();
  const Matrix proj_b = support_projector(sb).mat();
  const double support_leak = (proj_a * candidate * proj_b - candidate).norm();
  if (support_leak > slack * (1.0 + candidate.norm())) return false;
  return spectral_norm(k) <= 1.0 + slack;
}

}  // namespace

MaximalityCertificate check_geometric_mean_maximality(
    const PositiveForm& alpha, const PositiveForm& beta, int candidate_count,
    CounterRng& rng) {
  const PositiveForm gm = geometric_mean(alpha, beta);
  const int n = alpha.dim();
  const double scale =
      1.0 + alpha.gram().norm() + beta.gram().norm();

  // 0 <= M <= I random compression
  auto random_contraction_psd = [&]() {
    const Matrix u = random_unitary(n, rng);
    RealVector d(n);
    for (int i = 0; i < n; ++i) d[i] = rng.uniform();
    return Matrix(u * d.asDiagonal().toDenseMatrix().cast<Complex>() *
                  u.adjoint());
  };
  auto compressed = [&](const PositiveForm& form) {
    const Matrix s = sqrt_psd(HermitianOperator::symmetrized(form.gram())).mat();
    const Matrix m = random_contraction_psd();
    return PositiveForm(s * m * s);
  };

  MaximalityCertificate cert;
  cert.candidates = candidate_count;
  cert.worst_min_eig = std::numeric_limits<double>::infinity();
  for (int i = 0; i < candidate_count; ++i) {
    Matrix candidate;
    switch (i % 3) {
      case 0:
        candidate = rng.uniform(0.05, 1.0) * gm.gram();
        break;
      case 1:
        candidate =
            geometric_mean(compressed(alpha), compressed(beta)).gram();
        break;
      default: {
        const double theta = rng.uniform();
        candidate = theta * rng.uniform(0.05, 1.0) * gm.gram() +
                    (1.0 - theta) *
                        geometric_mean(compressed(alpha), compressed(beta))
                            .gram();
        break;
      }
    }
    if (!dominated_exactly(candidate, alpha, beta)) {
      ++cert.rejected_by_domination;
      continue;
    }
    const LoewnerCertificate psd = psd_certificate(
        gm.gram() - candidate, tolerances().maximality * scale);
    cert.worst_min_eig = std::min(cert.worst_min_eig, psd.min_eig);
    if (!psd.holds) ++cert.failures;
  }
  return cert;
}

GridCertificate check_interpolation_monotonicity(
    const PositiveForm& alpha_prime, const PositiveForm& alpha,
    const PositiveForm& beta_prime, const PositiveForm& beta,
    const std::vector<double>& t_grid) {
  const Tolerances& tol = tolerances();
  const double scale = 1.0 + alpha.gram().norm() + beta.gram().norm();
  if (!psd_certificate(alpha.gram() - alpha_prime.gram(),
                       tol.form_order * scale)
           .holds ||
      !psd_certificate(beta.gram() - beta_prime.gram(), tol.form_order * scale)
           .holds)
    throw PreconditionError(
        "check_interpolation_monotonicity: inputs are not ordered");

  const CompatiblePair upper = build_compatible_pair(alpha, beta);
  const CompatiblePair lower = build_compatible_pair(alpha_prime, beta_prime);

  GridCertificate cert;
  cert.t_grid = t_grid;
  cert.worst_min_eig = std::numeric_limits<double>::infinity();
  cert.holds = true;
  for (double t : t_grid) {
    const Matrix diff =
        interpolate(upper, t).gram() - interpolate(lower, t).gram();
    const LoewnerCertificate psd =
        psd_certificate(diff, tol.form_order * scale);
    cert.min_eigs.push_back(psd.min_eig);
    cert.worst_min_eig = std::min(cert.worst_min_eig, psd.min_eig);
    cert.holds = cert.holds && psd.holds;
  }
  return cert;
}

PositiveForm pullback_form(const Matrix& psi, const PositiveForm& alpha) {
  if (psi.rows() != alpha.dim())
    throw DimensionError("pullback_form: map does not land in the form space");
  return PositiveForm(psi.adjoint() * alpha.gram() * psi);
}

GridCertificate check_pullback_inequality(const Matrix& psi,
                                          const PositiveForm& alpha,
                                          const PositiveForm& beta,
                                          const std::vector<double>& t_grid) {
  const Tolerances& tol = tolerances();
  const PositiveForm pulled_alpha = pullback_form(psi, alpha);
  const PositiveForm pulled_beta = pullback_form(psi, beta);
  const CompatiblePair big = build_compatible_pair(alpha, beta);
  const CompatiblePair small = build_compatible_pair(pulled_alpha, pulled_beta);
  const double scale = 1.0 + alpha.gram().norm() + beta.gram().norm() +
                       psi.norm() * psi.norm();

  GridCertificate cert;
  cert.t_grid = t_grid;
  cert.worst_min_eig = std::numeric_limits<double>::infinity();
  cert.holds = true;
  for (double t : t_grid) {
    const Matrix lhs =
        psi.adjoint() * interpolate(big, t).gram() * psi;  // psi^* gamma^t
    const Matrix rhs = interpolate(small, t).gram();
    const LoewnerCertificate psd =
        psd_certificate(rhs - lhs, tol.pullback * scale);
    cert.min_eigs.push_back(psd.min_eig);
    cert.worst_min_eig = std::min(cert.worst_min_eig, psd.min_eig);
    cert.holds = cert.holds && psd.holds;
  }
  return cert;
}

std::vector<double> dyadic_grid(int denominator) {
  if (denominator < 1) throw DomainError("dyadic_grid: denominator >= 1");
  std::vector<double> grid;
  for (int k = 0; k <= denominator; ++k)
    grid.push_back(static_cast<double>(k) / denominator);
  return grid;
}

std::vector<double> default_t_schedule() {
  std::vector<double> t;
  for (int k = 3; k <= 40; ++k) t.push_back(std::pow(2.0, -k));
  return t;
}

EntropyFormResult entropy_form(const DensityOperator& rho,
                               const DensityOperator& sigma,
                               const Matrix& probe_a, const Matrix& probe_b,
                               const std::vector<double>& t_schedule) {
  if (rho.dim() != sigma.dim())
    throw DimensionError("entropy_form: dimension mismatch");
  if (probe_a.rows() != rho.dim() || probe_a.cols() != rho.dim() ||
      probe_b.rows() != rho.dim() || probe_b.cols() != rho.dim())
    throw DimensionError("entropy_form: probe dimension mismatch");
  if (t_schedule.empty())
    throw ScheduleError("entropy_form: schedule must be non-empty");
  double prev_t = 1.0;
  for (double t : t_schedule) {
    if (!(t > 0.0) || !(t < prev_t))
      throw ScheduleError("entropy_form: schedule must decrease in (0, 1)");
    prev_t = t;
  }

  const SpectralDecomposition sr = eig_hermitian(rho.op());
  const SpectralDecomposition ss = eig_hermitian(sigma.op());
  const double tau_r = support_threshold(sr.eigenvalues);
  const double tau_s = support_threshold(ss.eigenvalues);

  // gamma^t(A, B) = sum_{jk} lambda_j^{1-t} mu_k^t T_jk with
  // T_jk = (X^dag B Y)_{jk} (Y^dag A^dag X)_{kj}; the t -> 0 endpoint is
  // rho_L(A, B) = sum over the same weights with mu_k^0 = 1.
  const Matrix left = sr.eigenvectors.adjoint() * probe_b * ss.eigenvectors;
  const Matrix right =
      ss.eigenvectors.adjoint() * probe_a.adjoint() * sr.eigenvectors;

  struct Term {
    double log_ratio;
    Complex weight;  // lambda_j * T_jk
  };
  std::vector<Term> finite_terms;
  Complex divergent_mass = 0.0;  // sum of lambda_j T_jk over ker(sigma)
  for (Eigen::Index j = 0; j < sr.eigenvalues.size(); ++j) {
    const double lam = sr.eigenvalues[j] > tau_r ? sr.eigenvalues[j] : 0.0;
    if (lam == 0.0) continue;
    for (Eigen::Index k = 0; k < ss.eigenvalues.size(); ++k) {
      const Complex t_jk = left(j, k) * right(k, j);
      const double mu = ss.eigenvalues[k] > tau_s ? ss.eigenvalues[k] : 0.0;
      if (mu == 0.0)
        divergent_mass += lam * t_jk;
      else
        finite_terms.push_back(Term{std::log(mu) - std::log(lam), lam * t_jk});
    }
  }

  EntropyFormResult result;
  result.t_used = t_schedule;
  result.divergence_mass = divergent_mass.real();

  double running = std::numeric_limits<double>::infinity();
  for (double t : t_schedule) {
    Complex acc = 0.0;
    for (const Term& term : finite_terms)
      acc += term.weight * std::expm1(t * term.log_ratio);
    const double quotient = (acc - divergent_mass).real() / t;
    result.quotients.push_back(quotient);
    running = std::min(running, quotient);
    result.running_inf.push_back(running);
  }

  // The -1/t component is known exactly from the thresholded spectra; the
  // Dini slope against 1/t is kept as an independent estimate.
  double dini_estimate = 0.0;
  if (result.quotients.size() >= 2) {
    const std::size_t last = result.quotients.size() - 1;
    const double x_last = 1.0 / t_schedule[last];
    const double x_prev = 1.0 / t_schedule[last - 1];
    dini_estimate = (result.quotients[last - 1] - result.quotients[last]) /
                    (x_last - x_prev);
  }
  const double mass_scale = 1.0 + probe_a.norm() * probe_b.norm();
  result.divergent =
      std::abs(divergent_mass.real()) > 1e-7 * mass_scale ||
      dini_estimate > tolerances().divergence_slope;
  result.value = result.divergent
                     ? ExtendedReal::plus_infinity()
                     : ExtendedReal::finite(-result.running_inf.back());
  return result;
}

Matrix partial_trace_adjoint_matrix(const BipartiteDims& dims) {
  const int n_a = dims.d_a * dims.d_a;
  Matrix psi(dims.d_ab() * dims.d_ab(), n_a);
  const Matrix id_b = Matrix::Identity(dims.d_b, dims.d_b);
  for (int c = 0; c < n_a; ++c) {
    Matrix e = Matrix::Zero(dims.d_a, dims.d_a);
    e(c % dims.d_a, c / dims.d_a) = 1.0;
    psi.col(c) = vec(kron(e, id_b));
  }
  return psi;
}

UhlmannCertificate uhlmann_monotonicity(const DensityOperator& rho_ab,
                                        const DensityOperator& sigma_ab,
                                        const BipartiteDims& dims,
                                        const std::vector<double>& t_grid) {
  if (rho_ab.dim() != dims.d_ab())
    throw DimensionError("uhlmann_monotonicity: dims mismatch");
  const Tolerances& tol = tolerances();

  const DensityOperator rho_a(
      HermitianOperator::symmetrized(partial_trace_b(rho_ab.mat(), dims)));
  const DensityOperator sigma_a(
      HermitianOperator::symmetrized(partial_trace_b(sigma_ab.mat(), dims)));

  UhlmannCertificate cert;
  cert.t_grid = t_grid;
  cert.s_joint = relative_entropy_support(rho_ab, sigma_ab);
  cert.s_reduced = relative_entropy_support(rho_a, sigma_a);

  const Matrix psi = partial_trace_adjoint_matrix(dims);
  const PositiveForm rho_l = form_from_operator_pair(rho_ab, MulSide::left);
  const PositiveForm sigma_r = form_from_operator_pair(sigma_ab, MulSide::right);
  const PositiveForm pulled_rho = pullback_form(psi, rho_l);
  const PositiveForm pulled_sigma = pullback_form(psi, sigma_r);
  const PositiveForm reduced_rho = form_from_operator_pair(rho_a, MulSide::left);
  const PositiveForm reduced_sigma =
      form_from_operator_pair(sigma_a, MulSide::right);

  // Schwarz step: psi* rho_L <= Tr_b(rho)_L and psi* sigma_R <= Tr_b(sigma)_R.
  cert.schwarz_rho_min_eig =
      psd_certificate(reduced_rho.gram() - pulled_rho.gram(),
                      tol.form_order)
          .min_eig;
  cert.schwarz_sigma_min_eig =
      psd_certificate(reduced_sigma.gram() - pulled_sigma.gram(),
                      tol.form_order)
          .min_eig;

  // Trace preservation at the identity probes.
  const Vector id_a = vec(Matrix::Identity(dims.d_a, dims.d_a));
  const Vector id_ab = vec(Matrix::Identity(dims.d_ab(), dims.d_ab()));
  cert.trace_preservation_defect =
      std::abs(rho_l.diagonal(id_ab) - reduced_rho.diagonal(id_a));

  const CompatiblePair pulled_pair =
      build_compatible_pair(pulled_rho, pulled_sigma);

  const SpectralDecomposition sr = eig_hermitian(rho_ab.op());
  const SpectralDecomposition ss = eig_hermitian(sigma_ab.op());
  const Eigen::MatrixXd joint_overlaps =
      (sr.eigenvectors.adjoint() * ss.eigenvectors).cwiseAbs2();
  const SpectralDecomposition sra = eig_hermitian(rho_a.op());
  const SpectralDecomposition ssa = eig_hermitian(sigma_a.op());
  const Eigen::MatrixXd reduced_overlaps =
      (sra.eigenvectors.adjoint() * ssa.eigenvectors).cwiseAbs2();

  cert.worst_pullback_gap = std::numeric_limits<double>::infinity();
  cert.worst_interp_min_eig = std::numeric_limits<double>::infinity();
  cert.worst_quotient_gap = std::numeric_limits<double>::infinity();

  bool links_ok =
      cert.schwarz_rho_min_eig >= -tol.form_order &&
      cert.schwarz_sigma_min_eig >= -tol.form_order &&
      cert.trace_preservation_defect <= tol.quotient_comparison;

  cert.links.push_back(ChainLink{"form: psi* rho_L <= Tr_b(rho)_L",
                                 cert.schwarz_rho_min_eig, 0.0,
                                 cert.schwarz_rho_min_eig, false,
                                 cert.schwarz_rho_min_eig >= -tol.form_order});
  cert.links.push_back(
      ChainLink{"form: psi* sigma_R <= Tr_b(sigma)_R",
                cert.schwarz_sigma_min_eig, 0.0, cert.schwarz_sigma_min_eig,
                false, cert.schwarz_sigma_min_eig >= -tol.form_order});
  cert.links.push_back(ChainLink{
      "identity: rho_L(id) = Tr_b(rho)_L(id)", rho_l.diagonal(id_ab),
      reduced_rho.diagonal(id_a), cert.trace_preservation_defect, true,
      cert.trace_preservation_defect <= tol.quotient_comparison});

  for (double t : t_grid) {
    const double s_joint_t = interpolation_trace(sr, ss, joint_overlaps, t);
    const double s_reduced_t =
        interpolation_trace(sra, ssa, reduced_overlaps, t);
    const PositiveForm pulled_gamma = interpolate(pulled_pair, t);
    const double s_pulled_t = pulled_gamma.diagonal(id_a);

    // (i) pull-back inequality at the identity probes
    const double pullback_gap = s_pulled_t - s_joint_t;
    cert.worst_pullback_gap = std::min(cert.worst_pullback_gap, pullback_gap);

    // (ii) interpolation monotonicity of the pulled pair under the reduced
    // pair, as forms
    const Matrix reduced_gamma =
        kron(matrix_power_psd(sigma_a.op(), t).transpose(),
             matrix_power_psd(rho_a.op(), 1.0 - t));
    const LoewnerCertificate interp_cert = psd_certificate(
        reduced_gamma - pulled_gamma.gram(), tol.form_order * dims.d_b);
    cert.worst_interp_min_eig =
        std::min(cert.worst_interp_min_eig, interp_cert.min_eig);

    // quotient comparison feeding the entropy inequality
    const double q_joint = (s_joint_t - rho_l.diagonal(id_ab)) / t;
    const double q_reduced = (s_reduced_t - reduced_rho.diagonal(id_a)) / t;
    const double quotient_gap = q_reduced - q_joint;
    cert.worst_quotient_gap = std::min(cert.worst_quotient_gap, quotient_gap);

    std::ostringstream label;
    label << "  [t = " << t << "]";
    cert.links.push_back(ChainLink{
        "scalar: gamma^t(id_ab) <= pulled gamma^t(id_a)" + label.str(),
        s_joint_t, s_pulled_t, pullback_gap, false,
        pullback_gap >= -tol.quotient_comparison});
    cert.links.push_back(ChainLink{
        "form: pulled gamma^t <= reduced gamma^t" + label.str(),
        interp_cert.min_eig, 0.0, interp_cert.min_eig, false,
        interp_cert.holds});
    cert.links.push_back(ChainLink{
        "scalar: joint quotient <= reduced quotient" + label.str(), q_joint,
        q_reduced, quotient_gap, false,
        quotient_gap >= -tol.quotient_comparison});
  }
  for (const ChainLink& link : cert.links) links_ok = links_ok && link.ok;

  // Entropy comparison from the difference quotients.
  const Matrix id_probe_ab = Matrix::Identity(dims.d_ab(), dims.d_ab());
  const Matrix id_probe_a = Matrix::Identity(dims.d_a, dims.d_a);
  const EntropyFormResult s_form_joint = entropy_form(
      rho_ab, sigma_ab, id_probe_ab, id_probe_ab, default_t_schedule());
  const EntropyFormResult s_form_reduced = entropy_form(
      rho_a, sigma_a, id_probe_a, id_probe_a, default_t_schedule());

  cert.branch_coherent =
      (s_form_joint.divergent ==
       !cert.s_joint.value.is_finite()) &&
      (s_form_reduced.divergent == !cert.s_reduced.value.is_finite());
  // supp nesting propagates through the trace: a divergent reduced side
  // forces a divergent joint side
  if (s_form_reduced.divergent && !s_form_joint.divergent)
    cert.branch_coherent = false;

  if (s_form_joint.value.is_finite() && s_form_reduced.value.is_finite()) {
    cert.final_gap =
        s_form_joint.value.value() - s_form_reduced.value.value();
    cert.holds = links_ok && cert.branch_coherent &&
                 cert.final_gap >= -tol.chain_gap;
  } else {
    cert.final_gap = 0.0;
    cert.holds = links_ok && cert.branch_coherent &&
                 (!s_form_joint.value.is_finite());
  }
  return cert;
}

}  // namespace relent
