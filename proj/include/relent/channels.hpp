#pragma once

#include <functional>
#include <vector>

#include "relent/states.hpp"

namespace relent {

struct BipartiteDims {
  int d_a = 0;
  int d_b = 0;
  int d_ab() const { return d_a * d_b; }
};

// Composite index convention: |i>_a |j>_b sits at i * d_b + j, matching
// kron(A_a, B_b).

Matrix partial_trace_b(const Matrix& x_ab, const BipartiteDims& dims);
HermitianOperator partial_trace_b(const HermitianOperator& x_ab,
                                  const BipartiteDims& dims);

// Adjoint w.r.t. the Hilbert-Schmidt inner product: X_a -> X_a (x) id_b.
Matrix partial_trace_adjoint(const Matrix& x_a, const BipartiteDims& dims);
HermitianOperator partial_trace_adjoint(const HermitianOperator& x_a,
                                        const BipartiteDims& dims);

// Kraus-represented CPTP map. Trace preservation and complete positivity
// (PSD Choi matrix) are certified at construction.
class QuantumChannel {
 public:
  static QuantumChannel from_kraus(std::vector<Matrix> kraus);

  const std::vector<Matrix>& kraus() const { return kraus_; }
  int d_in() const { return d_in_; }
  int d_out() const { return d_out_; }
  double completeness_defect() const { return completeness_defect_; }
  double choi_min_eig() const { return choi_min_eig_; }

  Matrix apply(const Matrix& x) const;          // sum_i K x K^dag
  Matrix apply_adjoint(const Matrix& y) const;  // sum_i K^dag y K

  // Column-stacking Choi matrix sum_i vec(K_i) vec(K_i)^dag.
  Matrix choi() const;

  static QuantumChannel identity(int dim);

 private:
  QuantumChannel() = default;
  std::vector<Matrix> kraus_;
  int d_in_ = 0, d_out_ = 0;
  double completeness_defect_ = 0.0;
  double choi_min_eig_ = 0.0;
};

DensityOperator apply_channel(const QuantumChannel& c,
                              const DensityOperator& rho);

struct SchwarzCertificate {
  bool holds = false;
  double min_eig = 0.0;  // smallest eigenvalue of Phi(X^dag X) - Phi(X^dag)Phi(X)
};

// Certifies Phi(X^dag) Phi(X) <= Phi(X^dag X) for a unital positive map
// given by its action.
SchwarzCertificate schwarz_certificate(
    const std::function<Matrix(const Matrix&)>& phi, const Matrix& x,
    double tol);

// Environment-dilated form of a square channel: an isometry
// x -> sum_i (K_i x) (x) e_i completed to a unitary on d_a * env_dim, with
// pure reference state |e_0>. The completion is non-canonical; only the
// compression back through the partial trace matters.
struct StinespringDilation {
  int d_a = 0;
  int env_dim = 0;
  Matrix unitary;  // (d_a * env_dim)^2 entries
  double completion_defect = 0.0;  // ||U^dag U - I||_F
  double roundtrip_defect = 0.0;   // worst basis-element reproduction error

  BipartiteDims dims() const { return {d_a, env_dim}; }
  DensityOperator env_state() const;      // |e_0><e_0|
  Matrix lift(const Matrix& x_a) const;   // U (x (x) e00) U^dag
  Matrix apply(const Matrix& x_a) const;  // Tr_env of lift
};

StinespringDilation stinespring_dilate(const QuantumChannel& c);

// Haar-ish random CPTP map: QR of a Ginibre block, split into Kraus blocks.
QuantumChannel random_channel(int dim, int kraus_count, CounterRng& rng);

}  // namespace relent
