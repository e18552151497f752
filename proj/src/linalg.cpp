#include "relent/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

namespace relent {

ExtendedReal ExtendedReal::finite(double v) {
  ExtendedReal e;
  e.kind_ = Kind::finite;
  e.value_ = v;
  return e;
}

ExtendedReal ExtendedReal::plus_infinity() {
  ExtendedReal e;
  e.kind_ = Kind::plus_inf;
  return e;
}

ExtendedReal ExtendedReal::minus_infinity() {
  ExtendedReal e;
  e.kind_ = Kind::minus_inf;
  return e;
}

double ExtendedReal::value() const {
  if (!is_finite()) throw DomainError("ExtendedReal: not finite: " + str());
  return value_;
}

std::string ExtendedReal::str() const {
  switch (kind_) {
    case Kind::plus_inf:
      return "+inf";
    case Kind::minus_inf:
      return "-inf";
    default: {
      std::ostringstream os;
      os << value_;
      return os.str();
    }
  }
}

bool ExtendedReal::operator==(const ExtendedReal& o) const {
  if (kind_ != o.kind_) return false;
  return kind_ != Kind::finite || value_ == o.value_;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

HermitianOperator::HermitianOperator(Matrix m) {
  if (m.rows() != m.cols())
    throw DimensionError("HermitianOperator: matrix must be square");
  if (!all_finite(m))
    throw DomainError("HermitianOperator: non-finite entries");
  defect_ = (m - m.adjoint()).norm();
  const double tol = tolerances().hermitian_rel * (1.0 + m.norm());
  if (defect_ > tol) {
    std::ostringstream os;
    os << "HermitianOperator: hermiticity defect " << defect_
       << " exceeds tolerance " << tol;
    throw OrderError(os.str());
  }
  mat_ = std::move(m);
}

HermitianOperator HermitianOperator::symmetrized(Matrix m) {
  if (m.rows() != m.cols())
    throw DimensionError("HermitianOperator: matrix must be square");
  Matrix h = 0.5 * (m + m.adjoint());
  return HermitianOperator(std::move(h));
}

SpectralDecomposition eig_hermitian(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat());
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eig_hermitian: eigensolver did not converge; ||A||_F = "
       << a.mat().norm();
    throw ConvergenceError(os.str());
  }
  SpectralDecomposition sd;
  sd.eigenvalues = solver.eigenvalues();
  sd.eigenvectors = solver.eigenvectors();

  const Matrix recomposed = sd.eigenvectors *
                            sd.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
                            sd.eigenvectors.adjoint();
  sd.recomposition_defect = (recomposed - a.mat()).norm();
  sd.orthonormality_defect =
      (sd.eigenvectors.adjoint() * sd.eigenvectors -
       Matrix::Identity(a.dim(), a.dim()))
          .norm();

  const Tolerances& tol = tolerances();
  if (sd.recomposition_defect > tol.recomposition_rel * (1.0 + a.mat().norm()))
    throw ConvergenceError("eig_hermitian: recomposition residual " +
                           std::to_string(sd.recomposition_defect));
  if (sd.orthonormality_defect > tol.orthonormality)
    throw ConvergenceError("eig_hermitian: eigenvector orthonormality residual " +
                           std::to_string(sd.orthonormality_defect));
  return sd;
}

bool Interval::contains(double x) const {
  if (open_lo ? !(x > lo) : !(x >= lo)) return false;
  if (open_hi ? !(x < hi) : !(x <= hi)) return false;
  return true;
}

std::string Interval::str() const {
  std::ostringstream os;
  os << (open_lo ? '(' : '[') << lo << ", " << hi << (open_hi ? ')' : ']');
  return os.str();
}

Interval Interval::reals() { return {}; }

Interval Interval::positive() {
  Interval i;
  i.lo = 0.0;
  i.open_lo = true;
  return i;
}

Interval Interval::nonnegative() {
  Interval i;
  i.lo = 0.0;
  return i;
}

Interval Interval::closed(double lo, double hi) {
  Interval i;
  i.lo = lo;
  i.hi = hi;
  return i;
}

HermitianOperator matrix_function(const HermitianOperator& a,
                                  const std::function<double(double)>& f,
                                  const Interval& domain) {
  const SpectralDecomposition sd = eig_hermitian(a);
  RealVector mapped(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
    const double lambda = sd.eigenvalues[i];
    if (!domain.contains(lambda)) {
      std::ostringstream os;
      os << "matrix_function: eigenvalue " << lambda
         << " outside declared domain " << domain.str();
      throw DomainError(os.str());
    }
    mapped[i] = f(lambda);
  }
  Matrix result = sd.eigenvectors *
                  mapped.asDiagonal().toDenseMatrix().cast<Complex>() *
                  sd.eigenvectors.adjoint();
  return HermitianOperator::symmetrized(std::move(result));
}

double support_threshold(const RealVector& eigenvalues) {
  const double lambda_max =
      eigenvalues.size() ? std::max(eigenvalues.maxCoeff(), 0.0) : 0.0;
  return tolerances().support_rel * (1.0 + lambda_max);
}

namespace {

void require_psd(const RealVector& eigenvalues, double tol,
                 const char* where) {
  if (eigenvalues.size() && eigenvalues.minCoeff() < -tol) {
    std::ostringstream os;
    os << where << ": operator not PSD, lambda_min = "
       << eigenvalues.minCoeff();
    throw OrderError(os.str());
  }
}

}  // namespace

ExtendedLog log_extended(const HermitianOperator& a) {
  const SpectralDecomposition sd = eig_hermitian(a);
  return log_extended(a, support_threshold(sd.eigenvalues));
}

ExtendedLog log_extended(const HermitianOperator& a, double support_tol) {
  const SpectralDecomposition sd = eig_hermitian(a);
  require_psd(sd.eigenvalues, support_tol, "log_extended");

  const Eigen::Index d = a.dim();
  RealVector finite_vals = RealVector::Zero(d);
  RealVector kernel_vals = RealVector::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (sd.eigenvalues[i] > support_tol)
      finite_vals[i] = std::log(sd.eigenvalues[i]);
    else
      kernel_vals[i] = 1.0;
  }
  auto assemble = [&](const RealVector& dvals) {
    Matrix m = sd.eigenvectors *
               dvals.asDiagonal().toDenseMatrix().cast<Complex>() *
               sd.eigenvectors.adjoint();
    return HermitianOperator::symmetrized(std::move(m));
  };
  return ExtendedLog{assemble(finite_vals), assemble(kernel_vals)};
}

LoewnerCertificate loewner_leq(const HermitianOperator& a,
                               const HermitianOperator& b, double tol) {
  if (a.dim() != b.dim())
    throw DimensionError("loewner_leq: dimension mismatch");
  return psd_certificate(b.mat() - a.mat(), tol);
}

LoewnerCertificate psd_certificate(const Matrix& m, double tol) {
  const HermitianOperator h = HermitianOperator::symmetrized(m);
  const SpectralDecomposition sd = eig_hermitian(h);
  LoewnerCertificate cert;
  cert.min_eig = sd.eigenvalues.size() ? sd.eigenvalues.minCoeff() : 0.0;
  cert.holds = cert.min_eig >= -tol;
  return cert;
}

HermitianOperator support_projector(const HermitianOperator& a) {
  const SpectralDecomposition sd = eig_hermitian(a);
  return support_projector(a, support_threshold(sd.eigenvalues));
}

HermitianOperator support_projector(const HermitianOperator& a, double tol) {
  const SpectralDecomposition sd = eig_hermitian(a);
  require_psd(sd.eigenvalues, tol, "support_projector");
  Matrix p = Matrix::Zero(a.dim(), a.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i) {
    if (sd.eigenvalues[i] > tol)
      p += sd.eigenvectors.col(i) * sd.eigenvectors.col(i).adjoint();
  }
  return HermitianOperator::symmetrized(std::move(p));
}

HermitianOperator sqrt_psd(const HermitianOperator& a) {
  const SpectralDecomposition sd = eig_hermitian(a);
  require_psd(sd.eigenvalues, support_threshold(sd.eigenvalues), "sqrt_psd");
  RealVector roots(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < roots.size(); ++i)
    roots[i] = std::sqrt(std::max(sd.eigenvalues[i], 0.0));
  Matrix m = sd.eigenvectors *
             roots.asDiagonal().toDenseMatrix().cast<Complex>() *
             sd.eigenvectors.adjoint();
  return HermitianOperator::symmetrized(std::move(m));
}

HermitianOperator inv_sqrt_pd(const HermitianOperator& a) {
  const SpectralDecomposition sd = eig_hermitian(a);
  const double tau = support_threshold(sd.eigenvalues);
  if (sd.eigenvalues.minCoeff() <= tau) {
    std::ostringstream os;
    os << "inv_sqrt_pd: operator singular, lambda_min = "
       << sd.eigenvalues.minCoeff();
    throw DomainError(os.str());
  }
  RealVector inv_roots(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < inv_roots.size(); ++i)
    inv_roots[i] = 1.0 / std::sqrt(sd.eigenvalues[i]);
  Matrix m = sd.eigenvectors *
             inv_roots.asDiagonal().toDenseMatrix().cast<Complex>() *
             sd.eigenvectors.adjoint();
  return HermitianOperator::symmetrized(std::move(m));
}

double min_eigenvalue(const HermitianOperator& a) {
  return eig_hermitian(a).eigenvalues.minCoeff();
}

std::vector<std::pair<double, Matrix>> eigenspace_projectors(
    const SpectralDecomposition& sd) {
  std::vector<std::pair<double, Matrix>> out;
  const Eigen::Index d = sd.eigenvalues.size();
  if (d == 0) return out;
  const double tau =
      tolerances().cluster_rel * (1.0 + std::max(sd.eigenvalues.maxCoeff(), 0.0));
  Eigen::Index i = 0;
  while (i < d) {
    Eigen::Index j = i;
    while (j + 1 < d && sd.eigenvalues[j + 1] - sd.eigenvalues[i] <= tau) ++j;
    Matrix p = Matrix::Zero(sd.eigenvectors.rows(), sd.eigenvectors.rows());
    double mean = 0.0;
    for (Eigen::Index k = i; k <= j; ++k) {
      p += sd.eigenvectors.col(k) * sd.eigenvectors.col(k).adjoint();
      mean += sd.eigenvalues[k];
    }
    out.emplace_back(mean / static_cast<double>(j - i + 1), std::move(p));
    i = j + 1;
  }
  return out;
}

ConvexityReport check_operator_convexity(
    const std::function<double(double)>& f, const Interval& domain, int trials,
    int dim, std::uint64_t seed) {
  ConvexityReport report;
  report.dim = dim;
  report.trials = trials;
  report.worst_min_eig = std::numeric_limits<double>::infinity();

  CounterRng rng = CounterRng::substream(seed, "operator-convexity", 0);

  auto sample_in_domain = [&]() {
    // Spectrum mapped affinely into a random subinterval of `domain`;
    // spread chosen log-uniformly so both tight and wide spectra appear.
    double lo = domain.lo, hi = domain.hi;
    const double margin = std::pow(10.0, rng.uniform(-3.0, 0.0));
    const double width = std::pow(10.0, rng.uniform(-1.0, 1.0));
    if (!std::isfinite(lo)) lo = -width;
    double a = domain.open_lo ? lo + margin : lo + margin * rng.uniform();
    double b = a + width;
    if (std::isfinite(hi)) {
      const double cap = domain.open_hi ? hi - 1e-12 * (1 + std::abs(hi)) : hi;
      if (b > cap) b = cap;
      if (a >= b) a = std::max(lo + (domain.open_lo ? 1e-12 : 0.0),
                               b - 0.5 * (cap - lo));
    }
    Matrix h = random_hermitian(dim, rng);
    const SpectralDecomposition sd =
        eig_hermitian(HermitianOperator::symmetrized(h));
    const double mn = sd.eigenvalues.minCoeff();
    const double mx = sd.eigenvalues.maxCoeff();
    const double span = (mx > mn) ? (mx - mn) : 1.0;
    RealVector mapped(sd.eigenvalues.size());
    for (Eigen::Index i = 0; i < mapped.size(); ++i)
      mapped[i] = a + (sd.eigenvalues[i] - mn) / span * (b - a);
    Matrix m = sd.eigenvectors *
               mapped.asDiagonal().toDenseMatrix().cast<Complex>() *
               sd.eigenvectors.adjoint();
    return HermitianOperator::symmetrized(std::move(m));
  };

  for (int trial = 0; trial < trials; ++trial) {
    const HermitianOperator a = sample_in_domain();
    const HermitianOperator b = sample_in_domain();
    const HermitianOperator mid =
        HermitianOperator::symmetrized(0.5 * (a.mat() + b.mat()));
    const HermitianOperator lhs = matrix_function(mid, f, domain);
    const Matrix rhs_mat = 0.5 * (matrix_function(a, f, domain).mat() +
                                  matrix_function(b, f, domain).mat());
    const LoewnerCertificate cert =
        loewner_leq(lhs, HermitianOperator::symmetrized(rhs_mat),
                    tolerances().loewner);
    if (cert.min_eig < report.worst_min_eig) {
      report.worst_min_eig = cert.min_eig;
      report.witness_a = a.mat();
      report.witness_b = b.mat();
      report.has_witness = true;
    }
    if (!cert.holds) ++report.violations;
  }
  return report;
}

Vector vec(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols)
    throw DimensionError("unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b);
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

Matrix random_ginibre(int rows, int cols, CounterRng& rng) {
  Matrix g(rows, cols);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i)
      g(i, j) = Complex(rng.gaussian(), rng.gaussian()) * inv_sqrt2;
  return g;
}

Matrix random_hermitian(int dim, CounterRng& rng) {
  Matrix g = random_ginibre(dim, dim, rng);
  return 0.5 * (g + g.adjoint());
}

Matrix random_unitary(int dim, CounterRng& rng) {
  Matrix g = random_ginibre(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Phase fix makes the distribution Haar rather than QR-convention biased.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    const Complex rii = r(i, i);
    const double mag = std::abs(rii);
    q.col(i) *= (mag > 0) ? rii / mag : Complex(1.0, 0.0);
  }
  return q;
}

}  // namespace relent
