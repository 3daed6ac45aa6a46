#ifndef PROJGEOM_LINALG_HPP
#define PROJGEOM_LINALG_HPP

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace projgeom {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad input: wrong dimensions, failed invariants, malformed data.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// A precondition of an operation is not met by otherwise valid data.
class NotApplicableError : public Error {
public:
  explicit NotApplicableError(const std::string& msg) : Error(msg) {}
};

/// Numerically ill-conditioned request (e.g. spectrum touching a cut point).
class IllConditionedError : public Error {
public:
  explicit IllConditionedError(const std::string& msg) : Error(msg) {}
};

/// Numerical policy shared by the whole toolkit.
///
/// eq_tol governs entrywise/spectral equality, cluster_tol the radius used
/// to merge eigenvalues into one spectral point, iter_max caps iterative
/// diagnostics.  Invariant: 0 < eq_tol < cluster_tol < 1.
struct Tolerance {
  double eq_tol = 1e-10;
  double cluster_tol = 1e-6;
  int iter_max = 10000;

  void validate() const {
    if (!(0.0 < eq_tol && eq_tol < cluster_tol && cluster_tol < 1.0))
      throw ValidationError("Tolerance requires 0 < eq_tol < cluster_tol < 1");
    if (iter_max < 1) throw ValidationError("Tolerance requires iter_max >= 1");
  }
};

inline void require_finite(const Matrix& m, const char* what = "matrix") {
  if (!m.allFinite())
    throw ValidationError(std::string(what) + " contains non-finite entries");
}

/// Operator norm (largest singular value).
inline double op_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0)
    throw ValidationError("op_norm: empty matrix");
  require_finite(m, "op_norm input");
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

/// Eigendecomposition of a Hermitian matrix.  Eigenvalues sorted descending;
/// column i of eigenvectors belongs to eigenvalues(i).
struct HermitianSpectrum {
  RealVector eigenvalues;
  Matrix eigenvectors;
};

inline HermitianSpectrum hermitian_eig(const Matrix& m,
                                       const Tolerance& tol = Tolerance{}) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw ValidationError("hermitian_eig: matrix must be square and nonempty");
  require_finite(m, "hermitian_eig input");
  const double asym = op_norm(m - m.adjoint());
  const double scale = std::max(1.0, op_norm(m));
  if (asym > tol.eq_tol * scale)
    throw ValidationError("hermitian_eig: input not Hermitian, ||m - m*|| = " +
                          std::to_string(asym));
  Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0);
  if (es.info() != Eigen::Success)
    throw Error("hermitian_eig: eigensolver failed to converge");
  // Eigen sorts ascending; flip to descending.
  const Eigen::Index n = m.rows();
  HermitianSpectrum out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = Matrix(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    out.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
  return out;
}

struct EigenCluster {
  double value;       // cluster mean
  int multiplicity;
};

/// Single-linkage clustering of eigenvalues: values sorted descending are
/// merged while consecutive gaps stay within `radius`.
inline std::vector<EigenCluster> cluster_eigenvalues(const RealVector& sorted_desc,
                                                     double radius) {
  if (radius <= 0.0) throw ValidationError("cluster_eigenvalues: radius must be positive");
  std::vector<EigenCluster> out;
  Eigen::Index i = 0;
  const Eigen::Index n = sorted_desc.size();
  while (i < n) {
    Eigen::Index j = i + 1;
    double sum = sorted_desc(i);
    while (j < n && sorted_desc(j - 1) - sorted_desc(j) <= radius) {
      sum += sorted_desc(j);
      ++j;
    }
    out.push_back({sum / static_cast<double>(j - i), static_cast<int>(j - i)});
    i = j;
  }
  return out;
}

inline std::vector<EigenCluster> cluster_eigenvalues(const HermitianSpectrum& s,
                                                     double radius) {
  return cluster_eigenvalues(s.eigenvalues, radius);
}

/// Functional calculus f(m) for Hermitian m.
template <typename Fn>
Matrix hermitian_function(const Matrix& m, Fn&& f,
                          const Tolerance& tol = Tolerance{}) {
  const HermitianSpectrum s = hermitian_eig(m, tol);
  RealVector vals(s.eigenvalues.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = f(s.eigenvalues(i));
  return s.eigenvectors * vals.asDiagonal() * s.eigenvectors.adjoint();
}

/// Orthogonal projection onto the span of eigenvectors whose eigenvalue
/// satisfies the predicate.
template <typename Pred>
Matrix spectral_projection(const HermitianSpectrum& s, Pred&& keep) {
  const Eigen::Index n = s.eigenvectors.rows();
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
    if (keep(s.eigenvalues(i)))
      p += s.eigenvectors.col(i) * s.eigenvectors.col(i).adjoint();
  return p;
}

/// Hilbert-Schmidt inner product <a,b> = trace(b* a).
inline Complex hs_inner(const Matrix& a, const Matrix& b) {
  return (b.adjoint() * a).trace();
}

inline double hs_norm(const Matrix& a) { return a.norm(); }

}  // namespace projgeom

#endif  // PROJGEOM_LINALG_HPP
