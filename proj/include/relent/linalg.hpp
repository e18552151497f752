#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "relent/rng.hpp"
#include "relent/tolerances.hpp"

namespace relent {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
// Violations of positivity / Loewner-order preconditions.
struct OrderError : Error {
  using Error::Error;
};
struct ConvergenceError : Error {
  using Error::Error;
};
struct StateError : Error {
  using Error::Error;
};
struct ScheduleError : Error {
  using Error::Error;
};
struct PreconditionError : Error {
  using Error::Error;
};
struct SchemaError : Error {
  using Error::Error;
};

// Real value extended with the symbolic infinities used by the entropy
// conventions (log 0 = -inf, divergent relative entropy = +inf). Infinities
// are tags, never floating-point inf, so downstream comparisons stay total.
class ExtendedReal {
 public:
  ExtendedReal() = default;
  static ExtendedReal finite(double v);
  static ExtendedReal plus_infinity();
  static ExtendedReal minus_infinity();

  bool is_finite() const { return kind_ == Kind::finite; }
  bool is_plus_infinity() const { return kind_ == Kind::plus_inf; }
  bool is_minus_infinity() const { return kind_ == Kind::minus_inf; }
  double value() const;  // throws DomainError unless finite
  std::string str() const;

  bool operator==(const ExtendedReal& o) const;

 private:
  enum class Kind { finite, plus_inf, minus_inf };
  Kind kind_ = Kind::finite;
  double value_ = 0.0;
};

bool all_finite(const Matrix& m);

// Square complex matrix certified Hermitian at construction.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m);
  // Replaces m by (m + m^dag)/2 before certifying; used for results of
  // spectral reassembly where roundoff breaks exact symmetry.
  static HermitianOperator symmetrized(Matrix m);

  const Matrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }
  double hermiticity_defect() const { return defect_; }

 private:
  HermitianOperator() = default;
  Matrix mat_;
  double defect_ = 0.0;
};

struct SpectralDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // unitary, columns match eigenvalues
  double recomposition_defect = 0.0;
  double orthonormality_defect = 0.0;
};

SpectralDecomposition eig_hermitian(const HermitianOperator& a);

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool open_lo = false;
  bool open_hi = false;

  bool contains(double x) const;
  std::string str() const;

  static Interval reals();
  static Interval positive();      // (0, inf)
  static Interval nonnegative();   // [0, inf)
  static Interval closed(double lo, double hi);
};

// f(A) = U f(D) U^dag. Every eigenvalue must lie in `domain`.
HermitianOperator matrix_function(const HermitianOperator& a,
                                  const std::function<double(double)>& f,
                                  const Interval& domain);

// log of a PSD operator with the kernel carried symbolically:
// finite_part = sum_{lambda > tau} log(lambda) P_lambda, and
// kernel_projector marks where the -inf contribution lives.
struct ExtendedLog {
  HermitianOperator finite_part;
  HermitianOperator kernel_projector;
};

ExtendedLog log_extended(const HermitianOperator& a);
ExtendedLog log_extended(const HermitianOperator& a, double support_tol);

struct LoewnerCertificate {
  bool holds = false;
  double min_eig = 0.0;
};

// A <= B iff lambda_min(B - A) >= -tol.
LoewnerCertificate loewner_leq(const HermitianOperator& a,
                               const HermitianOperator& b, double tol);
// PSD certificate for a raw (numerically Hermitian) matrix.
LoewnerCertificate psd_certificate(const Matrix& m, double tol);

// Default support threshold: support_rel * (1 + lambda_max).
double support_threshold(const RealVector& eigenvalues);

HermitianOperator support_projector(const HermitianOperator& a);
HermitianOperator support_projector(const HermitianOperator& a, double tol);

// PSD square root with eigenvalue clamping at max(lambda, 0).
HermitianOperator sqrt_psd(const HermitianOperator& a);
// Inverse square root; requires lambda_min above the support threshold.
HermitianOperator inv_sqrt_pd(const HermitianOperator& a);
double min_eigenvalue(const HermitianOperator& a);

// Projectors onto eigenspaces, grouping eigenvalues within
// cluster_rel * (1 + lambda_max).
std::vector<std::pair<double, Matrix>> eigenspace_projectors(
    const SpectralDecomposition& sd);

struct ConvexityReport {
  int dim = 0;
  int trials = 0;
  int violations = 0;
  double worst_min_eig = 0.0;  // most negative gap eigenvalue seen
  bool has_witness = false;
  Matrix witness_a, witness_b;
};

// Samples random Hermitian pairs with spectra in `domain` and checks the
// midpoint convexity inequality f((A+B)/2) <= (f(A)+f(B))/2 in Loewner
// order. Checks only the dimension given; says nothing about other ones.
ConvexityReport check_operator_convexity(
    const std::function<double(double)>& f, const Interval& domain, int trials,
    int dim, std::uint64_t seed);

// Column-stacking vectorization (project-wide convention).
Vector vec(const Matrix& x);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);
Matrix kron(const Matrix& a, const Matrix& b);

double spectral_norm(const Matrix& m);

Matrix random_ginibre(int rows, int cols, CounterRng& rng);
Matrix random_hermitian(int dim, CounterRng& rng);
Matrix random_unitary(int dim, CounterRng& rng);

}  // namespace relent
