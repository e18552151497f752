#pragma once

#include "relent/channels.hpp"
#include "relent/states.hpp"

namespace relent {

enum class EntropyBranch { finite, infinite_support_violation };

struct RelEntropyResult {
  ExtendedReal value;               // nats; +inf on support violation
  EntropyBranch branch = EntropyBranch::finite;
  double support_overlap = 0.0;     // ||(I - P_sigma) P_rho||_2
};

// Support-based relative entropy, evaluated in the sigma eigenbasis:
// S = sum_j lambda_j (log lambda_j - sum_k log(mu_k) |<x_j, y_k>|^2).
RelEntropyResult relative_entropy_support(const DensityOperator& rho,
                                          const DensityOperator& sigma);

struct RegularizedRelEntropy {
  std::vector<double> eps;
  std::vector<double> values;  // Tr(rho_eps log rho_eps - rho_eps log sigma_eps)
  ExtendedReal limit;          // last value, or +inf when divergent
  bool divergent = false;
  double slope = 0.0;          // regression of values against -log(eps)
  // polynomial extrapolation of the tail to eps = 0; valid on the finite
  // branch, where the trace is analytic in eps
  double limit_estimate = 0.0;
};

RegularizedRelEntropy relative_entropy_regularized(
    const DensityOperator& rho, const DensityOperator& sigma,
    const std::vector<double>& eps_schedule);

// eps_k = 10^{-2-k}, k = 0..10; tightens the extrapolated limit for
// cross-method comparisons.
std::vector<double> deep_eps_schedule();

struct UnitaryInvarianceCheck {
  bool branches_match = false;
  double defect = 0.0;  // |S(U rho U^dag || U sigma U^dag) - S(rho || sigma)|
};

UnitaryInvarianceCheck check_unitary_invariance(const DensityOperator& rho,
                                                const DensityOperator& sigma,
                                                const Matrix& u);

// |S(rho1 (x) rho2 || sigma1 (x) sigma2) - S(rho1||sigma1) - S(rho2||sigma2)|.
// Coherently infinite branches count as defect 0.
double check_additivity(const DensityOperator& rho1,
                        const DensityOperator& sigma1,
                        const DensityOperator& rho2,
                        const DensityOperator& sigma2);

// Data-processing certificate with the dilation chain replayed step by step:
// dilate, trace out, unitary invariance, additivity.
struct DpiCertificate {
  RelEntropyResult input_entropy;   // S(rho || sigma)
  RelEntropyResult output_entropy;  // S(C(rho) || C(sigma))
  bool holds = false;
  double gap = 0.0;  // S_in - S_out on finite branches

  double dilation_defect = 0.0;            // C vs dilated compression
  double trace_monotonicity_gap = 0.0;     // lifted minus reduced (>= -tol)
  double unitary_invariance_defect = 0.0;  // lifted vs product
  double additivity_defect = 0.0;          // product vs input
  bool branch_coherent = true;
};

DpiCertificate dpi_via_stinespring(const DensityOperator& rho,
                                   const DensityOperator& sigma,
                                   const QuantumChannel& c);

}  // namespace relent
