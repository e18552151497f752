#pragma once

#include <vector>

#include "relent/channels.hpp"
#include "relent/modular.hpp"
#include "relent/states.hpp"

namespace relent {

// Hilbert-Schmidt orthonormal operator basis. The project-wide default is
// the matrix-unit basis ordered to match column-stacking vec indices.
struct OperatorBasis {
  int op_dim = 0;
  std::vector<Matrix> elements;

  static OperatorBasis matrix_units(int d);
  double orthonormality_defect() const;
};

// Positive sesquilinear form stored as its Gram matrix over a fixed
// orthonormal basis of the underlying space. Hermiticity and positivity
// are certified at construction; kernel vectors are automatically
// isotropic for a PSD Gram matrix.
class PositiveForm {
 public:
  explicit PositiveForm(Matrix gram);

  const Matrix& gram() const { return gram_; }
  int dim() const { return static_cast<int>(gram_.rows()); }
  double psd_defect() const { return psd_defect_; }

  Complex operator()(const Vector& v, const Vector& w) const;
  double diagonal(const Vector& v) const;  // real quadratic value

  // max |alpha(v, v)| over an orthonormal kernel basis
  double kernel_isotropy_defect() const;

 private:
  Matrix gram_;
  double psd_defect_ = 0.0;
};

enum class MulSide { left, right };

// rho_L(A, B) = Tr(A^dag rho B) or sigma_R(A, B) = Tr(sigma A^dag B) over an
// explicit orthonormal operator basis.
PositiveForm form_from_operator_pair(const DensityOperator& state,
                                     MulSide side, const OperatorBasis& basis);
// Fast path over the default matrix-unit basis: the Gram matrix is the
// superoperator matrix of L_rho (resp. R_sigma).
PositiveForm form_from_operator_pair(const DensityOperator& state,
                                     MulSide side);

struct FormRepresentation {
  int target_dim = 0;
  Matrix h;   // target_dim x n, full row rank
  Matrix op;  // target_dim x target_dim Hermitian PSD

  // ||h^dag op h - gram||_F
  double reproduction_defect(const PositiveForm& form) const;
};

// Two representations with the same quotient map whose operators commute
// and sum to the identity.
struct CompatiblePair {
  Matrix h;
  Matrix a_op;
  Matrix b_op;
  double commutator_norm = 0.0;
  double unit_sum_defect = 0.0;
  double reproduction_defect_alpha = 0.0;
  double reproduction_defect_beta = 0.0;

  FormRepresentation rep_alpha() const;
  FormRepresentation rep_beta() const;
};

// Quotient construction: h = D^{1/2} U^dag over the support of
// gram(alpha) + gram(beta); A is alpha pushed to the quotient, B = I - A.
CompatiblePair build_compatible_pair(const PositiveForm& alpha,
                                     const PositiveForm& beta);

// Same pair expressed after a unitary rotation of the quotient space, or a
// rescaling h -> c h (operators scale by 1/c^2); both remain compatible
// representations of the same forms.
CompatiblePair rotate_pair(const CompatiblePair& pair, const Matrix& q);
CompatiblePair scale_pair(const CompatiblePair& pair, double c);

// gamma^t(v, w) = <h v, A^{1-t} B^t h w> with 0^s := 0 for s in (0, 1] and
// 0^0 := 1, so t = 0, 1 reproduce the endpoint forms exactly.
PositiveForm interpolate(const CompatiblePair& pair, double t);
PositiveForm interpolate(const PositiveForm& alpha, const PositiveForm& beta,
                         double t);
// Direct superoperator route for the state-induced forms:
// gram = (sigma^t)^T (x) rho^{1-t}.
PositiveForm interpolate_states_direct(const DensityOperator& rho,
                                       const DensityOperator& sigma, double t);

// Max pairwise Gram discrepancy of gamma^t across rep_count distinct
// compatible pairs (rotations and a rescaling of the quotient pair).
double check_representation_independence(const PositiveForm& alpha,
                                         const PositiveForm& beta, double t,
                                         int rep_count, CounterRng& rng);

// || gamma^t_{gamma^{t1} -> gamma^{t2}} - gamma^{t1(1-t)+t2 t} ||_F
double interpolation_composition_defect(const PositiveForm& alpha,
                                        const PositiveForm& beta, double t1,
                                        double t2, double t);

PositiveForm geometric_mean(const PositiveForm& alpha,
                            const PositiveForm& beta);

struct DominationReport {
  int probes = 0;
  int violations = 0;
  double worst_margin = 0.0;  // max of |gm(v,w)|^2 - alpha(v,v) beta(w,w)
};

DominationReport check_geometric_mean_domination(const PositiveForm& alpha,
                                                 const PositiveForm& beta,
                                                 int probes, CounterRng& rng);

struct MaximalityCertificate {
  int candidates = 0;
  int rejected_by_domination = 0;  // sampler rejections, not failures
  int failures = 0;
  double worst_min_eig = 0.0;
};

// Samples positive forms dominated by (alpha, beta) — scaled copies of the
// geometric mean, geometric means of compressed pairs, and their convex
// combinations, accepted by an exact domination test — and certifies each
// sits below sqrt(alpha beta).
MaximalityCertificate check_geometric_mean_maximality(
    const PositiveForm& alpha, const PositiveForm& beta, int candidate_count,
    CounterRng& rng);

struct GridCertificate {
  std::vector<double> t_grid;
  std::vector<double> min_eigs;
  double worst_min_eig = 0.0;
  bool holds = false;
};

// alpha' <= alpha and beta' <= beta imply gamma^t' <= gamma^t on the grid.
GridCertificate check_interpolation_monotonicity(
    const PositiveForm& alpha_prime, const PositiveForm& alpha,
    const PositiveForm& beta_prime, const PositiveForm& beta,
    const std::vector<double>& t_grid);

// gram' = Psi^dag gram Psi for a linear map given by its matrix between the
// chosen bases.
PositiveForm pullback_form(const Matrix& psi, const PositiveForm& alpha);

// psi^* gamma^t_{alpha -> beta} <= gamma^t_{psi^* alpha -> psi^* beta}.
GridCertificate check_pullback_inequality(const Matrix& psi,
                                          const PositiveForm& alpha,
                                          const PositiveForm& beta,
                                          const std::vector<double>& t_grid);

std::vector<double> dyadic_grid(int denominator);  // {k/denominator}

// Default difference-quotient schedule t_k = 2^{-k}; deep enough that the
// O(t) discretization error sits below the cross-method tolerance.
std::vector<double> default_t_schedule();  // k = 3..40

struct EntropyFormResult {
  ExtendedReal value;
  std::vector<double> t_used;
  std::vector<double> quotients;    // [gamma^t(A,B) - rho_L(A,B)] / t
  std::vector<double> running_inf;  // running infimum of the quotients
  bool divergent = false;
  double divergence_mass = 0.0;  // estimated coefficient of the -1/t term
};

// Entropy form S(A, B) = -liminf_{t->0+} [gamma^t(A,B) - rho_L(A,B)] / t
// evaluated stably in the joint eigenbases; at probes (id, id) this is the
// relative entropy, divergent exactly when the supports do not nest.
EntropyFormResult entropy_form(const DensityOperator& rho,
                               const DensityOperator& sigma,
                               const Matrix& probe_a, const Matrix& probe_b,
                               const std::vector<double>& t_schedule);

struct UhlmannCertificate {
  std::vector<double> t_grid;
  double worst_pullback_gap = 0.0;        // scalar pull-back link at id probes
  double worst_interp_min_eig = 0.0;      // pulled <= reduced, PSD per t
  double schwarz_rho_min_eig = 0.0;       // Tr_b(rho)_L - psi* rho_L
  double schwarz_sigma_min_eig = 0.0;     // Tr_b(sigma)_R - psi* sigma_R
  double trace_preservation_defect = 0.0;
  double worst_quotient_gap = 0.0;        // q_a(t) - q_ab(t), >= -tol

  RelEntropyResult s_joint;
  RelEntropyResult s_reduced;
  double final_gap = 0.0;
  bool branch_coherent = true;
  bool holds = false;

  std::vector<ChainLink> links;
};

// Monotonicity through interpolations and pull-backs; valid for arbitrary
// supports with no regularization.
UhlmannCertificate uhlmann_monotonicity(const DensityOperator& rho_ab,
                                        const DensityOperator& sigma_ab,
                                        const BipartiteDims& dims,
                                        const std::vector<double>& t_grid);

// Matrix of Tr_b^dag : B(H_a) -> B(H_ab) between matrix-unit bases.
Matrix partial_trace_adjoint_matrix(const BipartiteDims& dims);

}  // namespace relent
