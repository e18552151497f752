#include "relent/states.hpp"

#include <cmath>
#include <sstream>

namespace relent {

DensityOperator::DensityOperator(HermitianOperator op) : op_(std::move(op)) {
  const SpectralDecomposition sd = eig_hermitian(op_);
  const double tau = support_threshold(sd.eigenvalues);
  if (sd.eigenvalues.minCoeff() < -tau) {
    std::ostringstream os;
    os << "DensityOperator: not PSD, lambda_min = " << sd.eigenvalues.minCoeff();
    throw StateError(os.str());
  }
  trace_defect_ = std::abs(op_.mat().trace().real() - 1.0) +
                  std::abs(op_.mat().trace().imag());
  if (trace_defect_ > tolerances().state_trace) {
    std::ostringstream os;
    os << "DensityOperator: trace defect " << trace_defect_;
    throw StateError(os.str());
  }
}

DensityOperator::DensityOperator(Matrix m)
    : DensityOperator(HermitianOperator(std::move(m))) {}

RegularizedState::RegularizedState(DensityOperator base_state, double eps)
    : base(std::move(base_state)), epsilon(eps) {
  if (!(eps > 0)) throw DomainError("RegularizedState: epsilon must be > 0");
}

Matrix RegularizedState::op() const {
  return base.mat() + epsilon * Matrix::Identity(base.dim(), base.dim());
}

double von_neumann_entropy(const DensityOperator& rho) {
  const SpectralDecomposition sd = eig_hermitian(rho.op());
  const double tau = support_threshold(sd.eigenvalues);
  double s = 0.0;
  for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
    const double lambda = sd.eigenvalues[i];
    if (lambda > tau) s -= lambda * std::log(lambda);
  }
  return s;
}

std::vector<double> default_eps_schedule() {
  std::vector<double> eps;
  for (int k = 0; k <= 6; ++k) eps.push_back(std::pow(10.0, -2.0 - k));
  return eps;
}

void validate_eps_schedule(const std::vector<double>& eps_schedule) {
  if (eps_schedule.empty())
    throw ScheduleError("epsilon schedule must be non-empty");
  double prev = std::numeric_limits<double>::infinity();
  for (double e : eps_schedule) {
    if (!(e > 0) || !(e < prev))
      throw ScheduleError("epsilon schedule must decrease strictly to 0");
    prev = e;
  }
}

RegularizedEntropySequence regularized_entropy_limit(
    const DensityOperator& rho, const std::vector<double>& eps_schedule) {
  validate_eps_schedule(eps_schedule);
  const SpectralDecomposition sd = eig_hermitian(rho.op());

  RegularizedEntropySequence out;
  out.eps = eps_schedule;
  for (double eps : eps_schedule) {
    // rho_eps shares rho's eigenvectors, so the trace is an exact scalar sum.
    double v = 0.0;
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
      const double shifted = std::max(sd.eigenvalues[i], 0.0) + eps;
      v -= shifted * std::log(shifted);
    }
    out.values.push_back(v);
  }
  out.last = out.values.back();
  return out;
}

DensityOperator random_density(int dim, int rank, CounterRng& rng) {
  if (rank < 1 || rank > dim)
    throw DomainError("random_density: rank must satisfy 1 <= rank <= dim");
  const Matrix g = random_ginibre(dim, rank, rng);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityOperator(HermitianOperator::symmetrized(std::move(m)));
}

DensityOperator random_density_in_support(const DensityOperator& outer,
                                          int rank, CounterRng& rng) {
  const SpectralDecomposition sd = eig_hermitian(outer.op());
  const double tau = support_threshold(sd.eigenvalues);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i)
    if (sd.eigenvalues[i] > tau) kept.push_back(i);
  const int outer_rank = static_cast<int>(kept.size());
  if (rank < 1 || rank > outer_rank)
    throw DomainError("random_density_in_support: rank exceeds support size");

  Matrix basis(outer.dim(), outer_rank);
  for (int j = 0; j < outer_rank; ++j) basis.col(j) = sd.eigenvectors.col(kept[j]);
  const DensityOperator inner = random_density(outer_rank, rank, rng);
  Matrix m = basis * inner.mat() * basis.adjoint();
  return DensityOperator(HermitianOperator::symmetrized(std::move(m)));
}

double support_overlap_norm(const DensityOperator& rho,
                            const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim())
    throw DimensionError("support_contained: dimension mismatch");
  const Matrix p_rho = support_projector(rho.op()).mat();
  const Matrix p_sigma = support_projector(sigma.op()).mat();
  const Matrix outside =
      (Matrix::Identity(rho.dim(), rho.dim()) - p_sigma) * p_rho;
  return spectral_norm(outside);
}

bool support_contained(const DensityOperator& rho, const DensityOperator& sigma,
                       double tol) {
  return support_overlap_norm(rho, sigma) <= tol;
}

bool support_contained(const DensityOperator& rho,
                       const DensityOperator& sigma) {
  // Support projectors are 0/1-spectrum objects; a fixed modest threshold
  // separates "leaks outside" from projector roundoff.
  return support_contained(rho, sigma, 1e-7);
}

}  // namespace relent
