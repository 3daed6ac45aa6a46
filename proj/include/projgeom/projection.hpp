#ifndef PROJGEOM_PROJECTION_HPP
#define PROJGEOM_PROJECTION_HPP

#include "projgeom/linalg.hpp"

namespace projgeom {

/// Validated Hermitian idempotent.
class ProjectionMatrix {
public:
  ProjectionMatrix(Matrix m, const Tolerance& tol = Tolerance{})
      : matrix_(std::move(m)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols())
      throw ValidationError("ProjectionMatrix: matrix must be square and nonempty");
    require_finite(matrix_, "ProjectionMatrix");
    const double herm = op_norm(matrix_ - matrix_.adjoint());
    if (herm > tol.eq_tol)
      throw ValidationError("ProjectionMatrix: not Hermitian, ||P - P*|| = " +
                            std::to_string(herm));
    const double idem = op_norm(matrix_ * matrix_ - matrix_);
    if (idem > tol.eq_tol)
      throw ValidationError("ProjectionMatrix: not idempotent, ||P^2 - P|| = " +
                            std::to_string(idem));
  }

  const Matrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  int rank() const {
    // Eigenvalues of a projection sit at 0 and 1, so trace counts them.
    return static_cast<int>(std::lround(matrix_.trace().real()));
  }

  static ProjectionMatrix identity(Eigen::Index n) {
    return ProjectionMatrix(Matrix::Identity(n, n));
  }
  static ProjectionMatrix zero(Eigen::Index n) {
    return ProjectionMatrix(Matrix::Zero(n, n));
  }

  /// Projection onto the column span of (not necessarily orthonormal) `cols`.
  static ProjectionMatrix onto_span(const Matrix& cols,
                                    const Tolerance& tol = Tolerance{}) {
    if (cols.cols() == 0) return zero(cols.rows());
    Eigen::HouseholderQR<Matrix> qr(cols);
    Matrix q = qr.householderQ() * Matrix::Identity(cols.rows(), cols.cols());
    return ProjectionMatrix(q * q.adjoint(), tol);
  }

  ProjectionMatrix complement(const Tolerance& tol = Tolerance{}) const {
    return ProjectionMatrix(
        Matrix::Identity(matrix_.rows(), matrix_.cols()) - matrix_, tol);
  }

private:
  Matrix matrix_;
};

/// Orthonormal basis of range(P) as columns (eigenvectors at eigenvalue 1).
inline Matrix range_basis(const ProjectionMatrix& p,
                          const Tolerance& tol = Tolerance{}) {
  const HermitianSpectrum s = hermitian_eig(p.matrix(), tol);
  const Eigen::Index n = p.dim();
  Eigen::Index r = 0;
  while (r < n && s.eigenvalues(r) > 0.5) ++r;
  return s.eigenvectors.leftCols(r);
}

}  // namespace projgeom

#endif  // PROJGEOM_PROJECTION_HPP
