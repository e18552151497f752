#include "relent/channels.hpp"

#include <cmath>
#include <sstream>

namespace relent {

namespace {

void check_bipartite(const Matrix& x, const BipartiteDims& dims,
                     const char* where) {
  if (dims.d_a <= 0 || dims.d_b <= 0)
    throw DimensionError(std::string(where) + ": invalid dimensions");
  if (x.rows() != dims.d_ab() || x.cols() != dims.d_ab())
    throw DimensionError(std::string(where) +
                         ": operator does not match d_a * d_b");
}

}  // namespace

Matrix partial_trace_b(const Matrix& x_ab, const BipartiteDims& dims) {
  check_bipartite(x_ab, dims, "partial_trace_b");
  Matrix out = Matrix::Zero(dims.d_a, dims.d_a);
  for (int i = 0; i < dims.d_a; ++i)
    for (int k = 0; k < dims.d_a; ++k) {
      Complex acc = 0.0;
      for (int j = 0; j < dims.d_b; ++j)
        acc += x_ab(i * dims.d_b + j, k * dims.d_b + j);
      out(i, k) = acc;
    }
  return out;
}

HermitianOperator partial_trace_b(const HermitianOperator& x_ab,
                                  const BipartiteDims& dims) {
  return HermitianOperator::symmetrized(partial_trace_b(x_ab.mat(), dims));
}

Matrix partial_trace_adjoint(const Matrix& x_a, const BipartiteDims& dims) {
  if (x_a.rows() != dims.d_a || x_a.cols() != dims.d_a)
    throw DimensionError("partial_trace_adjoint: operator does not match d_a");
  return kron(x_a, Matrix::Identity(dims.d_b, dims.d_b));
}

HermitianOperator partial_trace_adjoint(const HermitianOperator& x_a,
                                        const BipartiteDims& dims) {
  return HermitianOperator::symmetrized(
      partial_trace_adjoint(x_a.mat(), dims));
}

QuantumChannel QuantumChannel::from_kraus(std::vector<Matrix> kraus) {
  if (kraus.empty())
    throw DomainError("QuantumChannel: empty Kraus family");
  QuantumChannel c;
  c.d_out_ = static_cast<int>(kraus.front().rows());
  c.d_in_ = static_cast<int>(kraus.front().cols());
  for (const Matrix& k : kraus) {
    if (k.rows() != c.d_out_ || k.cols() != c.d_in_)
      throw DimensionError("QuantumChannel: inconsistent Kraus dimensions");
    if (!all_finite(k))
      throw DomainError("QuantumChannel: non-finite Kraus entries");
  }
  c.kraus_ = std::move(kraus);

  Matrix sum = Matrix::Zero(c.d_in_, c.d_in_);
  for (const Matrix& k : c.kraus_) sum += k.adjoint() * k;
  c.completeness_defect_ =
      (sum - Matrix::Identity(c.d_in_, c.d_in_)).norm();
  if (c.completeness_defect_ > tolerances().channel_completeness) {
    std::ostringstream os;
    os << "QuantumChannel: trace preservation defect "
       << c.completeness_defect_;
    throw StateError(os.str());
  }

  const Matrix choi = c.choi();
  const SpectralDecomposition sd =
      eig_hermitian(HermitianOperator::symmetrized(choi));
  c.choi_min_eig_ = sd.eigenvalues.minCoeff();
  if (c.choi_min_eig_ < -support_threshold(sd.eigenvalues))
    throw OrderError("QuantumChannel: Choi matrix not PSD");
  return c;
}

Matrix QuantumChannel::apply(const Matrix& x) const {
  if (x.rows() != d_in_ || x.cols() != d_in_)
    throw DimensionError("QuantumChannel::apply: dimension mismatch");
  Matrix out = Matrix::Zero(d_out_, d_out_);
  for (const Matrix& k : kraus_) out += k * x * k.adjoint();
  return out;
}

Matrix QuantumChannel::apply_adjoint(const Matrix& y) const {
  if (y.rows() != d_out_ || y.cols() != d_out_)
    throw DimensionError("QuantumChannel::apply_adjoint: dimension mismatch");
  Matrix out = Matrix::Zero(d_in_, d_in_);
  for (const Matrix& k : kraus_) out += k.adjoint() * y * k;
  return out;
}

Matrix QuantumChannel::choi() const {
  Matrix j = Matrix::Zero(d_in_ * d_out_, d_in_ * d_out_);
  for (const Matrix& k : kraus_) {
    const Vector v = vec(k);
    j += v * v.adjoint();
  }
  return j;
}

QuantumChannel QuantumChannel::identity(int dim) {
  return from_kraus({Matrix::Identity(dim, dim)});
}

DensityOperator apply_channel(const QuantumChannel& c,
                              const DensityOperator& rho) {
  return DensityOperator(
      HermitianOperator::symmetrized(c.apply(rho.mat())));
}

SchwarzCertificate schwarz_certificate(
    const std::function<Matrix(const Matrix&)>& phi, const Matrix& x,
    double tol) {
  const Matrix lhs = phi(x.adjoint()) * phi(x);
  const Matrix rhs = phi(x.adjoint() * x);
  const LoewnerCertificate cert = psd_certificate(rhs - lhs, tol);
  return SchwarzCertificate{cert.holds, cert.min_eig};
}

DensityOperator StinespringDilation::env_state() const {
  Matrix e = Matrix::Zero(env_dim, env_dim);
  e(0, 0) = 1.0;
  return DensityOperator(HermitianOperator(std::move(e)));
}

Matrix StinespringDilation::lift(const Matrix& x_a) const {
  if (x_a.rows() != d_a || x_a.cols() != d_a)
    throw DimensionError("StinespringDilation::lift: dimension mismatch");
  Matrix e = Matrix::Zero(env_dim, env_dim);
  e(0, 0) = 1.0;
  return unitary * kron(x_a, e) * unitary.adjoint();
}

Matrix StinespringDilation::apply(const Matrix& x_a) const {
  return partial_trace_b(lift(x_a), dims());
}

StinespringDilation stinespring_dilate(const QuantumChannel& c) {
  if (c.d_in() != c.d_out())
    throw DimensionError(
        "stinespring_dilate: only square channels have this dilated form");
  const int d = c.d_in();
  const int r = std::max(static_cast<int>(c.kraus().size()), 2);
  const int n = d * r;

  // Isometry columns: V e_c = sum_i (K_i e_c) (x) e_i.
  Matrix v = Matrix::Zero(n, d);
  for (std::size_t i = 0; i < c.kraus().size(); ++i)
    for (int row = 0; row < d; ++row)
      for (int col = 0; col < d; ++col)
        v(row * r + static_cast<int>(i), col) += c.kraus()[i](row, col);

  // Complete to a unitary: column a*r of U carries V.col(a) so that
  // U (x (x) e_0) = V x; remaining columns via Gram-Schmidt over the
  // canonical basis.
  Matrix u = Matrix::Zero(n, n);
  std::vector<int> free_cols;
  for (int a = 0; a < d; ++a) u.col(a * r) = v.col(a);
  for (int idx = 0; idx < n; ++idx)
    if (idx % r != 0) free_cols.push_back(idx);

  int filled = d;  // columns a*r already set
  std::vector<int> occupied;
  for (int a = 0; a < d; ++a) occupied.push_back(a * r);

  int candidate = 0;
  for (int target : free_cols) {
    for (; candidate < 2 * n; ++candidate) {
      Vector w = Vector::Zero(n);
      w(candidate % n) = 1.0;
      // two orthogonalization passes keep loss of orthogonality at roundoff
      for (int pass = 0; pass < 2; ++pass)
        for (int occ : occupied) w -= u.col(occ).dot(w) * u.col(occ);
      const double norm = w.norm();
      if (norm > 1e-6) {
        u.col(target) = w / norm;
        occupied.push_back(target);
        ++filled;
        ++candidate;
        break;
      }
    }
  }
  if (filled != n)
    throw ConvergenceError("stinespring_dilate: unitary completion failed");

  StinespringDilation dil;
  dil.d_a = d;
  dil.env_dim = r;
  dil.unitary = std::move(u);
  dil.completion_defect =
      (dil.unitary.adjoint() * dil.unitary - Matrix::Identity(n, n)).norm();
  if (dil.completion_defect > tolerances().orthonormality * n)
    throw ConvergenceError("stinespring_dilate: completion not unitary");

  // Reproduce the channel on the full matrix-unit basis.
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Matrix e = Matrix::Zero(d, d);
      e(i, j) = 1.0;
      worst = std::max(worst, (dil.apply(e) - c.apply(e)).norm());
    }
  dil.roundtrip_defect = worst;
  if (worst > tolerances().dilation_roundtrip)
    throw ConvergenceError("stinespring_dilate: round-trip defect " +
                           std::to_string(worst));
  return dil;
}

QuantumChannel random_channel(int dim, int kraus_count, CounterRng& rng) {
  if (dim < 1 || kraus_count < 1)
    throw DomainError("random_channel: invalid parameters");
  const int n = dim * kraus_count;
  Matrix g = random_ginibre(n, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = Matrix(qr.householderQ()).leftCols(dim);
  std::vector<Matrix> kraus;
  kraus.reserve(kraus_count);
  for (int i = 0; i < kraus_count; ++i)
    kraus.push_back(q.block(i * dim, 0, dim, dim));
  return QuantumChannel::from_kraus(std::move(kraus));
}

}  // namespace relent
