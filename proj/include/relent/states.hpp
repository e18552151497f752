#pragma once

#include <cstdint>
#include <vector>

#include "relent/linalg.hpp"

namespace relent {

// PSD, unit-trace Hermitian operator; invariants certified at construction.
class DensityOperator {
 public:
  explicit DensityOperator(HermitianOperator op);
  explicit DensityOperator(Matrix m);

  const HermitianOperator& op() const { return op_; }
  const Matrix& mat() const { return op_.mat(); }
  Eigen::Index dim() const { return op_.dim(); }
  double trace_defect() const { return trace_defect_; }

 private:
  HermitianOperator op_;
  double trace_defect_ = 0.0;
};

// rho + epsilon * id. Strictly positive-definite; deliberately not
// renormalized, so its trace is 1 + epsilon * d.
struct RegularizedState {
  RegularizedState(DensityOperator base_state, double eps);

  DensityOperator base;
  double epsilon;
  Matrix op() const;
};

// -sum_{lambda > tau} lambda log(lambda), in nats.
double von_neumann_entropy(const DensityOperator& rho);

// Default geometric schedule eps_k = 10^{-2-k}, k = 0..6.
std::vector<double> default_eps_schedule();

struct RegularizedEntropySequence {
  std::vector<double> eps;
  std::vector<double> values;  // -Tr(rho_eps log rho_eps)
  double last = 0.0;
};

// The entropy as a limit of regularized traces; the schedule must decrease
// strictly to 0.
RegularizedEntropySequence regularized_entropy_limit(
    const DensityOperator& rho, const std::vector<double>& eps_schedule);

// Ginibre-induced random state of the requested rank: GG^dag / Tr(GG^dag)
// with G a d x rank matrix of standard complex Gaussians.
DensityOperator random_density(int dim, int rank, CounterRng& rng);

// Random state whose support lies inside the support of `outer`;
// rank <= rank(outer).
DensityOperator random_density_in_support(const DensityOperator& outer,
                                          int rank, CounterRng& rng);

// true iff ||(I - P_sigma) P_rho||_2 <= tol.
bool support_contained(const DensityOperator& rho, const DensityOperator& sigma,
                       double tol);
bool support_contained(const DensityOperator& rho,
                       const DensityOperator& sigma);
// The overlap norm itself (diagnostic).
double support_overlap_norm(const DensityOperator& rho,
                            const DensityOperator& sigma);

void validate_eps_schedule(const std::vector<double>& eps_schedule);

}  // namespace relent
