#ifndef PROJGEOM_ALGEBRA_HPP
#define PROJGEOM_ALGEBRA_HPP

#include "projgeom/two_projections.hpp"

#include <optional>
#include <random>
#include <vector>

namespace projgeom {

/// Finite-dimensional *-algebra given by a Hilbert-Schmidt orthonormal basis.
class SpanAlgebra {
public:
  /// Smallest *-closed, product-closed linear span containing the generators.
  /// Grows the basis by alternating product expansion with Gram-Schmidt
  /// re-orthonormalization; rank decisions happen at eq_tol.
  static SpanAlgebra span_closure(const std::vector<Matrix>& generators,
                                  const Tolerance& tol = Tolerance{}) {
    if (generators.empty())
      throw ValidationError("span_closure: needs at least one generator");
    const Eigen::Index n = generators.front().rows();
    for (const auto& g : generators) {
      if (g.rows() != g.cols())
        throw ValidationError("span_closure: generators must be square");
      if (g.rows() != n)
        throw ValidationError("span_closure: generator dimension mismatch");
      require_finite(g, "span_closure generator");
    }

    SpanAlgebra alg;
    alg.ambient_ = n;
    alg.generators_ = generators;
    auto& basis = alg.basis_;
    const Eigen::Index max_dim = n * n;

    auto try_add = [&](const Matrix& cand) {
      Matrix resid = cand;
      for (int pass = 0; pass < 2; ++pass)
        for (const Matrix& b : basis) resid -= hs_inner(resid, b) * b;
      const double nrm = resid.norm();
      if (nrm <= tol.eq_tol * std::max(1.0, cand.norm())) return false;
      if (static_cast<Eigen::Index>(basis.size()) >= max_dim)
        throw Error("span_closure: basis exceeded ambient dimension squared");
      basis.push_back(resid / nrm);
      return true;
    };

    for (const auto& g : generators) {
      try_add(g);
      try_add(g.adjoint());
    }
    std::size_t processed = 0;
    bool grew = true;
    while (grew) {
      grew = false;
      const std::size_t end = basis.size();
      for (std::size_t i = 0; i < end; ++i)
        if (try_add(basis[i].adjoint())) grew = true;
      for (std::size_t i = 0; i < end; ++i)
        for (std::size_t j = 0; j < end; ++j)
          if (i >= processed || j >= processed)
            if (try_add(basis[i] * basis[j])) grew = true;
      processed = end;
    }
    return alg;
  }

  /// Wrap an explicit orthonormal basis without running the closure.  Used by
  /// tests probing non-closed spans; invariants are the caller's business.
  static SpanAlgebra from_basis_unchecked(Eigen::Index ambient,
                                          std::vector<Matrix> basis,
                                          std::vector<Matrix> generators = {}) {
    SpanAlgebra alg;
    alg.ambient_ = ambient;
    alg.basis_ = std::move(basis);
    alg.generators_ = std::move(generators);
    return alg;
  }

  Eigen::Index ambient_dim() const { return ambient_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<Matrix>& basis() const { return basis_; }
  const std::vector<Matrix>& generators() const { return generators_; }

private:
  SpanAlgebra() = default;
  Eigen::Index ambient_ = 0;
  std::vector<Matrix> basis_;
  std::vector<Matrix> generators_;
};

/// Hilbert-Schmidt distance from x to the linear span of the basis.
inline double membership_residual(const SpanAlgebra& alg, const Matrix& x) {
  if (x.rows() != alg.ambient_dim() || x.cols() != alg.ambient_dim())
    throw ValidationError("membership_residual: dimension mismatch");
  Matrix resid = x;
  for (int pass = 0; pass < 2; ++pass)
    for (const Matrix& b : alg.basis()) resid -= hs_inner(resid, b) * b;
  return resid.norm();
}

namespace detail {

inline Matrix vec(const Matrix& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

/// Dimension of the linear span of a list of matrices (SVD rank with a
/// relative threshold).
inline int span_rank(const std::vector<Matrix>& mats, double rel_tol = 1e-8) {
  if (mats.empty()) return 0;
  const Eigen::Index len = mats.front().size();
  Matrix stacked(len, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t i = 0; i < mats.size(); ++i) stacked.col(i) = vec(mats[i]);
  Eigen::JacobiSVD<Matrix> svd(stacked);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

}  // namespace detail

/// The unique two-sided unit of the span, if it exists.  Found as the least
/// squares solution of u b = b u = b over the basis, then verified.
inline std::optional<ProjectionMatrix> unit_of(const SpanAlgebra& alg,
                                               const Tolerance& tol = Tolerance{}) {
  const Eigen::Index n = alg.ambient_dim();
  const auto& basis = alg.basis();
  const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
  if (k == 0) return std::nullopt;

  const Eigen::Index nn = n * n;
  Matrix a(2 * k * nn, k);
  Eigen::VectorXcd rhs(2 * k * nn);
  for (Eigen::Index j = 0; j < k; ++j) {
    rhs.segment(2 * j * nn, nn) = detail::vec(basis[j]);
    rhs.segment((2 * j + 1) * nn, nn) = detail::vec(basis[j]);
    for (Eigen::Index i = 0; i < k; ++i) {
      a.block(2 * j * nn, i, nn, 1) = detail::vec(basis[i] * basis[j]);
      a.block((2 * j + 1) * nn, i, nn, 1) = detail::vec(basis[j] * basis[i]);
    }
  }
  const Eigen::VectorXcd coeff = a.colPivHouseholderQr().solve(rhs);
  Matrix u = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < k; ++i) u += coeff(i) * basis[i];

  const double check_tol = 100.0 * tol.eq_tol;
  for (const Matrix& b : basis) {
    if (op_norm(u * b - b) > check_tol * std::max(1.0, op_norm(b)))
      return std::nullopt;
    if (op_norm(b * u - b) > check_tol * std::max(1.0, op_norm(b)))
      return std::nullopt;
  }
  Tolerance relaxed = tol;
  relaxed.eq_tol = std::min(tol.cluster_tol / 10.0, 1e-8);
  u = (u + u.adjoint()) / 2.0;
  return ProjectionMatrix(u, relaxed);
}

struct CenterReport {
  std::vector<Matrix> center_basis;
  std::vector<ProjectionMatrix> central_projections;  // minimal central idempotents
  std::vector<int> block_dims;                        // matrix size per block
};

/// Center of a unital span algebra: solves the linear commutation system on
/// the basis, then splits the abelian center into minimal idempotents by
/// diagonalizing a random self-adjoint central element (retrying on
/// degeneracy).
inline CenterReport center_of(const SpanAlgebra& alg,
                              const Tolerance& tol = Tolerance{},
                              std::uint64_t seed = 0) {
  const auto unit = unit_of(alg, tol);
  if (!unit)
    throw NotApplicableError("center_of: algebra is not unital");
  const Eigen::Index n = alg.ambient_dim();
  const auto& basis = alg.basis();
  const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index nn = n * n;

  Matrix comm(k * nn, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      comm.block(j * nn, i, nn, 1) =
          detail::vec(basis[i] * basis[j] - basis[j] * basis[i]);

  Eigen::JacobiSVD<Matrix> svd(comm, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cut = std::max(1.0, sv.size() > 0 ? sv(0) : 0.0) * 1e-8;
  CenterReport report;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= cut) {
      Matrix z = Matrix::Zero(n, n);
      for (Eigen::Index c = 0; c < k; ++c) z += svd.matrixV()(c, i) * basis[c];
      report.center_basis.push_back(z);
    }
  }
  const std::size_t blocks = report.center_basis.size();
  if (blocks == 0)
    throw Error("center_of: empty center in a unital algebra");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double memb_tol = 100.0 * tol.eq_tol;

  for (int attempt = 0; attempt < 32; ++attempt) {
    Matrix z = Matrix::Zero(n, n);
    for (const Matrix& c : report.center_basis)
      z += Complex(unif(rng), unif(rng)) * c;
    const Matrix h = (z + z.adjoint()) / 2.0;
    const double scale = std::max(1.0, op_norm(h));
    const HermitianSpectrum hs = hermitian_eig(h, tol);
    const auto clusters = cluster_eigenvalues(hs, tol.cluster_tol * scale);

    std::vector<ProjectionMatrix> projections;
    Matrix total = Matrix::Zero(n, n);
    bool ok = true;
    Eigen::Index idx = 0;
    for (const auto& c : clusters) {
      Matrix p = Matrix::Zero(n, n);
      for (int m = 0; m < c.multiplicity; ++m, ++idx)
        p += hs.eigenvectors.col(idx) * hs.eigenvectors.col(idx).adjoint();
      if (membership_residual(alg, p) > memb_tol) continue;  // kernel cluster
      Tolerance relaxed = tol;
      relaxed.eq_tol = std::min(tol.cluster_tol / 10.0, 1e-8);
      projections.emplace_back(p, relaxed);
      total += p;
    }
    if (projections.size() != blocks) ok = false;
    if (ok && op_norm(total - unit->matrix()) > memb_tol) ok = false;
    if (!ok) continue;

    // Block sizes from the compressed dimensions: dim(z A z) = d^2.
    std::vector<int> dims;
    for (const auto& zp : projections) {
      std::vector<Matrix> compressed;
      compressed.reserve(basis.size());
      for (const Matrix& b : basis)
        compressed.push_back(zp.matrix() * b * zp.matrix());
      const int d2 = detail::span_rank(compressed);
      const int d = static_cast<int>(std::lround(std::sqrt(double(d2))));
      if (d * d != d2) { ok = false; break; }
      dims.push_back(d);
    }
    if (!ok) continue;

    std::vector<std::size_t> order(projections.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (dims[x] != dims[y]) return dims[x] > dims[y];
      return projections[x].rank() > projections[y].rank();
    });
    for (std::size_t i : order) {
      report.central_projections.push_back(projections[i]);
      report.block_dims.push_back(dims[i]);
    }
    return report;
  }
  throw Error("center_of: failed to separate central blocks after 32 attempts");
}

/// True iff f is a minimal projection of the algebra: the compressed space
/// {f x f : x in basis} is one-dimensional.
inline bool minimality_check(const SpanAlgebra& alg, const ProjectionMatrix& f,
                             const Tolerance& tol = Tolerance{}) {
  if (membership_residual(alg, f.matrix()) > 100.0 * tol.eq_tol)
    throw ValidationError("minimality_check: projection is not in the algebra");
  std::vector<Matrix> compressed;
  compressed.reserve(alg.basis().size());
  for (const Matrix& b : alg.basis())
    compressed.push_back(f.matrix() * b * f.matrix());
  return detail::span_rank(compressed) == 1;
}

struct MinimalPair {
  ProjectionMatrix e;  // minimal, e <= p
  ProjectionMatrix f;  // minimal, f <= p⊥
  Matrix v;            // partial isometry with v v* = e, v* v = f
};

namespace detail {

/// Strictly shrink a projection of the algebra until it is minimal, by
/// splitting compressions e x e at their top spectral cluster.
inline ProjectionMatrix shrink_to_minimal(const SpanAlgebra& alg,
                                          ProjectionMatrix e,
                                          const Tolerance& tol) {
  const Eigen::Index n = alg.ambient_dim();
  for (Eigen::Index round = 0; round < n; ++round) {
    if (minimality_check(alg, e, tol)) return e;
    const Matrix rb = range_basis(e, tol);
    if (rb.cols() < 2) return e;
    bool split = false;
    for (const Matrix& b : alg.basis()) {
      const Matrix exe = e.matrix() * b * e.matrix();
      for (const Matrix& h :
           {Matrix((exe + exe.adjoint()) / 2.0),
            Matrix((exe - exe.adjoint()) / Complex(0.0, 2.0))}) {
        const Matrix hc = rb.adjoint() * h * rb;  // compression to range(e)
        const double scale = 1.0 + op_norm(hc);
        const HermitianSpectrum hs = hermitian_eig((hc + hc.adjoint()) / 2.0, tol);
        const Eigen::Index r = hc.rows();
        Matrix cols = Matrix::Zero(r, r);
        Eigen::Index taken = 0;
        for (Eigen::Index i = 0; i < r; ++i) {
          if (hs.eigenvalues(0) - hs.eigenvalues(i) <= tol.cluster_tol * scale) {
            cols.col(taken++) = hs.eigenvectors.col(i);
          }
        }
        if (taken == 0 || taken == r) continue;  // scalar on range(e)
        const Matrix sel = rb * cols.leftCols(taken);
        Tolerance relaxed = tol;
        relaxed.eq_tol = std::min(tol.cluster_tol / 10.0, 1e-8);
        Matrix sub = sel * sel.adjoint();
        e = ProjectionMatrix((sub + sub.adjoint()) / 2.0, relaxed);
        split = true;
        break;
      }
      if (split) break;
    }
    if (!split) return e;  // nothing separates it further
  }
  return e;
}

}  // namespace detail

/// Extraction of equivalent minimal projections straddling p: when p is not
/// central in the algebra, the polar decomposition of some p x p⊥ yields a
/// partial isometry carrying a minimal e <= p onto a minimal f <= p⊥.
/// Returns nothing iff p is central.
inline std::optional<MinimalPair> extract_equivalent_minimals(
    const SpanAlgebra& alg, const ProjectionMatrix& p,
    const Tolerance& tol = Tolerance{}) {
  if (membership_residual(alg, p.matrix()) > 100.0 * tol.eq_tol)
    throw ValidationError("extract_equivalent_minimals: p is not in the algebra");
  const Eigen::Index n = alg.ambient_dim();
  const Matrix pc = Matrix::Identity(n, n) - p.matrix();

  std::vector<Matrix> candidates = alg.generators();
  candidates.insert(candidates.end(), alg.basis().begin(), alg.basis().end());
  for (const Matrix& x : candidates) {
    const Matrix a = p.matrix() * x * pc;
    if (op_norm(a) <= 1e-8) continue;

    // Polar part of a = v|a| via SVD, restricted to nonzero singular values.
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > 1e-8 * sv(0)) ++r;
    const Matrix v = svd.matrixU().leftCols(r) * svd.matrixV().leftCols(r).adjoint();

    Tolerance relaxed = tol;
    relaxed.eq_tol = std::min(tol.cluster_tol / 10.0, 1e-8);
    ProjectionMatrix e0(v * v.adjoint(), relaxed);
    if (membership_residual(alg, e0.matrix()) > 1e-7) continue;
    const ProjectionMatrix e = detail::shrink_to_minimal(alg, e0, tol);
    const Matrix vmin = e.matrix() * v;
    ProjectionMatrix f((vmin.adjoint() * vmin + (vmin.adjoint() * vmin).adjoint()) / 2.0,
                       relaxed);
    if (!minimality_check(alg, e, tol) || !minimality_check(alg, f, tol)) continue;
    return MinimalPair{e, f, vmin};
  }
  return std::nullopt;
}

struct AngleAuditRow {
  int i = 0;
  int j = 0;
  double c_value = 0.0;
  int spec_cardinality = 0;     // clustered spectrum size of p_i p_j p_i
  double spectral_gap_at_1 = 0.0;
  bool degenerate = false;      // gap below cluster_tol
};

/// Pairwise angle and spectrum-cardinality audit of a projection family.
inline std::vector<AngleAuditRow> angle_audit(
    const std::vector<ProjectionMatrix>& projections,
    const Tolerance& tol = Tolerance{}) {
  for (std::size_t i = 1; i < projections.size(); ++i)
    if (projections[i].dim() != projections[0].dim())
      throw ValidationError("angle_audit: dimension mismatch in family");
  std::vector<AngleAuditRow> rows;
  for (std::size_t i = 0; i < projections.size(); ++i) {
    for (std::size_t j = i + 1; j < projections.size(); ++j) {
      AngleAuditRow row;
      row.i = static_cast<int>(i);
      row.j = static_cast<int>(j);
      row.c_value = angle_c(projections[i], projections[j], tol);
      const Matrix pqp =
          projections[i].matrix() * projections[j].matrix() * projections[i].matrix();
      row.spec_cardinality = static_cast<int>(
          cluster_eigenvalues(hermitian_eig((pqp + pqp.adjoint()) / 2.0, tol),
                              tol.cluster_tol)
              .size());
      row.spectral_gap_at_1 = spectral_gap_at_one(projections[i], projections[j], tol);
      row.degenerate = row.spectral_gap_at_1 < tol.cluster_tol;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace projgeom

#endif  // PROJGEOM_ALGEBRA_HPP
