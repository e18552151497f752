#pragma once

#include <string>
#include <vector>

#include "relent/channels.hpp"
#include "relent/entropy.hpp"

namespace relent {

// Linear map on operator spaces stored as a dense matrix over the
// column-stacking vectorization: vec(CXB) = (B^T (x) C) vec(X). The matrix
// of L_C is I (x) C and of R_B is B^T (x) I; this convention is fixed
// project-wide and asserted by round-trip tests.
struct Superoperator {
  Matrix mat;      // (out_dim^2) x (in_dim^2)
  int in_dim = 0;  // operator side length of the input space
  int out_dim = 0;

  Matrix apply(const Matrix& x) const;
  double hermiticity_defect() const;  // w.r.t. the Hilbert-Schmidt pairing
};

Superoperator left_multiplication(const Matrix& c);   // X -> CX
Superoperator right_multiplication(const Matrix& b);  // X -> XB

// Assembles the matrix of an arbitrary operator map column-by-column over
// the matrix-unit basis.
Superoperator superop_from_map(const std::function<Matrix(const Matrix&)>& f,
                               int in_dim, int out_dim);

// Worst deviation of `s` from `f` over the full matrix-unit basis.
double superop_action_defect(const Superoperator& s,
                             const std::function<Matrix(const Matrix&)>& f);

// L_sigma, R_rho and the relative modular operator
// Delta(A) = sigma A rho^{-1} = L_sigma R_rho^{-1}(A). Requires rho > 0.
struct ModularTriple {
  Superoperator left;     // L_sigma
  Superoperator right;    // R_rho
  Superoperator modular;  // Delta_{rho,sigma}
  double commutation_defect = 0.0;  // ||[L_sigma, R_rho]||_F
};

ModularTriple build_left_right(const HermitianOperator& rho,
                               const HermitianOperator& sigma);

// Modular operators of a bipartite pair and of its reduction; eps > 0
// replaces (rho, sigma) by (rho + eps id, sigma + eps id).
struct ModularPair {
  Superoperator delta_ab;
  Superoperator delta_a;
  double regularization_eps = 0.0;
};

ModularPair modular_pair(const HermitianOperator& rho_ab,
                         const HermitianOperator& sigma_ab,
                         const BipartiteDims& dims, double eps = 0.0);

// -<rho^{1/2}, log(Delta_{rho,sigma}) rho^{1/2}>; equals the relative
// entropy for strictly positive inputs (unit trace not required).
double entropy_via_modular(const HermitianOperator& rho,
                           const HermitianOperator& sigma);

// The map X -> (X Tr_b(rho)^{-1/2} (x) id_b) rho^{1/2} from operators on
// the reduced space into bipartite operators. For a strictly positive rho
// this is an isometry carrying Tr_b(rho)^{1/2} to rho^{1/2}.
struct ReductionIsometry {
  Matrix mat;  // d_ab^2 x d_a^2
  BipartiteDims dims;
  double isometry_defect = 0.0;  // ||V^dag V - I||_F
  double bridge_defect = 0.0;    // ||V vec(rho_a^{1/2}) - vec(rho^{1/2})||
  double operator_norm = 0.0;    // largest singular value
};

ReductionIsometry reduction_isometry(const HermitianOperator& rho_ab,
                                     const BipartiteDims& dims);

// V^dag Delta V <= Delta^a, plus the weighted-probe trace identity
// <Delta^a(X) rho_a^{1/2}, X rho_a^{1/2}> = Tr(X X^dag Tr_b(sigma)).
struct KeyInequalityCertificate {
  LoewnerCertificate loewner;
  double trace_identity_defect = 0.0;
  int probes = 0;
};

KeyInequalityCertificate check_key_inequality(const HermitianOperator& rho_ab,
                                              const HermitianOperator& sigma_ab,
                                              const BipartiteDims& dims,
                                              CounterRng& rng, int probes = 16);

// Scalar trials of the contractive Jensen-type inequality that fails for
// these functions: lhs <= rhs would be required, the table records where
// it breaks.
enum class JensenVariant {
  shifted_inverse,  // lhs = (a x a + xi)^{-1},  rhs = a (x + xi)^{-1} a
  negative_log      // lhs = -log(a x a),        rhs = -a log(x) a
};

struct JensenTrialRow {
  double x = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool violation = false;  // lhs > rhs
};

std::vector<JensenTrialRow> contractive_jensen_table(
    JensenVariant variant, double alpha, double xi,
    const std::vector<double>& x_grid);

std::vector<double> default_figure_grid();  // x in (0, 4], 160 points

struct ChainLink {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // rhs - lhs for inequalities, |difference| for identities
  bool equality = false;
  bool ok = false;
};

// Full monotonicity chain built from the modular machinery:
//   S(Tr_b rho || Tr_b sigma) = <r_a, -log(Delta^a) r_a>
//                            <= <r_a, -log(V^dag Delta V) r_a>
//                            <= <r_a, V^dag (-log Delta) V r_a> = S(rho||sigma)
// For singular inputs the chain runs on (rho_eps, sigma_eps) along the
// schedule and both endpoint traces must converge monotonically to the
// support-based values (or diverge coherently when supports do not nest).
struct MonotonicityCertificate {
  bool regularized = false;
  std::vector<double> eps_used;

  double worst_key_min_eig = 0.0;     // Delta^a - V^dag Delta V
  double worst_log_min_eig = 0.0;     // -log(V^dag Delta V) + log(Delta^a)
  double worst_jensen_min_eig = 0.0;  // V^dag(-log Delta)V + log(V^dag Delta V)
  double endpoint_defect_reduced = 0.0;
  double endpoint_defect_joint = 0.0;

  std::vector<double> joint_sequence;    // per-eps regularized traces
  std::vector<double> reduced_sequence;
  bool monotone_convergence = true;
  double limit_defect_joint = 0.0;
  double limit_defect_reduced = 0.0;

  RelEntropyResult s_joint;    // support-based S(rho||sigma)
  RelEntropyResult s_reduced;  // support-based S(Tr_b rho||Tr_b sigma)
  double final_gap = 0.0;      // S_joint - S_reduced on finite branches
  bool holds = false;

  std::vector<ChainLink> links;
};

MonotonicityCertificate corrected_monotonicity(
    const DensityOperator& rho_ab, const DensityOperator& sigma_ab,
    const BipartiteDims& dims, const std::vector<double>& eps_schedule);

// supp(rho) in supp(sigma) implies supp(Tr_b rho) in supp(Tr_b sigma);
// certified together with the kernel identity
// ker(T1 + T2) = ker(T1) /\ ker(T2) on the traced projector decomposition.
struct SupportTraceCertificate {
  bool output_nested = false;
  double output_overlap = 0.0;
  double projector_decomposition_defect = 0.0;  // ||Q^2 - Q||_F for Q = Pi - P
  double kernel_lemma_defect = 0.0;  // projector distance of the two kernels
};

SupportTraceCertificate support_inclusion_after_trace(
    const DensityOperator& rho_ab, const DensityOperator& sigma_ab,
    const BipartiteDims& dims);

// Kernel identity checked directly on a PSD pair: compares the projector
// onto ker(T1 + T2) against the intersection of kernels computed by
// restricting T2 to ker(T1).
double kernel_intersection_defect(const HermitianOperator& t1,
                                  const HermitianOperator& t2);

// sigma^{1/2} C^dag( C(sigma)^{-1/2} arg C(sigma)^{-1/2} ) sigma^{1/2}
Matrix petz_recovery_map(const DensityOperator& sigma, const QuantumChannel& c,
                         const Matrix& arg);
DensityOperator petz_recovery(const DensityOperator& sigma,
                              const QuantumChannel& c,
                              const DensityOperator& rho);
// ||P_{sigma,C}(C(sigma)) - sigma||_F
double recovery_identity_defect(const DensityOperator& sigma,
                                const QuantumChannel& c);

// Worst basis-element defect of
// V_sigma = L_{sigma^{-1/2}} o P_{sigma,Tr_b} o L_{Tr_b(sigma)^{1/2}}.
double reduction_isometry_factorization_defect(const DensityOperator& sigma_ab,
                                               const BipartiteDims& dims);

// Tr sqrt( sqrt(rho) tau sqrt(rho) )
double fidelity(const DensityOperator& rho, const DensityOperator& tau);

struct FawziRennerCertificate {
  double entropy_loss = 0.0;    // S(rho||sigma) - S(C rho||C sigma)
  double fidelity_value = 0.0;  // F(rho, P(C(rho)))
  double bound = 0.0;           // -2 log F
  double slack = 0.0;           // entropy_loss - bound
  bool holds = false;
};

FawziRennerCertificate fawzi_renner_check(const DensityOperator& rho,
                                          const DensityOperator& sigma,
                                          const QuantumChannel& c);

// Quadrature demonstration of -log x = int_0^inf (1/(x+xi) - 1/(1+xi)) dxi
// applied to the modular operator; validates the spectral route, the chain
// itself never uses it.
double entropy_via_integral(const DensityOperator& rho,
                            const DensityOperator& sigma, int panels = 48,
                            int nodes_per_panel = 16);

}  // namespace relent
