#ifndef PROJGEOM_TWO_PROJECTIONS_HPP
#define PROJGEOM_TWO_PROJECTIONS_HPP

#include "projgeom/projection.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace projgeom {

inline void require_same_dim(const ProjectionMatrix& p, const ProjectionMatrix& q) {
  if (p.dim() != q.dim())
    throw ValidationError("projection pair: dimension mismatch (" +
                          std::to_string(p.dim()) + " vs " +
                          std::to_string(q.dim()) + ")");
}

/// Meet p ∧ q: projection onto range(p) ∩ range(q), realized as the spectral
/// projection of pqp at the eigenvalue cluster around 1.
inline ProjectionMatrix meet(const ProjectionMatrix& p, const ProjectionMatrix& q,
                             const Tolerance& tol = Tolerance{}) {
  require_same_dim(p, q);
  const Matrix pqp = p.matrix() * q.matrix() * p.matrix();
  const HermitianSpectrum s = hermitian_eig((pqp + pqp.adjoint()) / 2.0, tol);
  const double cut = 1.0 - tol.cluster_tol;
  return ProjectionMatrix(
      spectral_projection(s, [cut](double v) { return v >= cut; }), tol);
}

/// Join p ∨ q = 1 − (p⊥ ∧ q⊥).
inline ProjectionMatrix join(const ProjectionMatrix& p, const ProjectionMatrix& q,
                             const Tolerance& tol = Tolerance{}) {
  require_same_dim(p, q);
  return meet(p.complement(tol), q.complement(tol), tol).complement(tol);
}

/// Angle invariant ||(p − p∧q)(q − p∧q)||, the cosine of the smallest
/// nonzero principal angle between the ranges.
inline double angle_c(const ProjectionMatrix& p, const ProjectionMatrix& q,
                      const Tolerance& tol = Tolerance{}) {
  require_same_dim(p, q);
  const Matrix e = meet(p, q, tol).matrix();
  const double v = op_norm((p.matrix() - e) * (q.matrix() - e));
  return std::clamp(v, 0.0, 1.0);
}

/// Distance from 1 to the nearest eigenvalue cluster of pqp strictly below
/// the 1-cluster; equals 1 when pqp has no spectrum below 1 - cluster_tol.
inline double spectral_gap_at_one(const ProjectionMatrix& p,
                                  const ProjectionMatrix& q,
                                  const Tolerance& tol = Tolerance{}) {
  require_same_dim(p, q);
  const Matrix pqp = p.matrix() * q.matrix() * p.matrix();
  const auto clusters =
      cluster_eigenvalues(hermitian_eig((pqp + pqp.adjoint()) / 2.0, tol),
                          tol.cluster_tol);
  double below = -1.0;
  for (const auto& c : clusters)
    if (c.value < 1.0 - tol.cluster_tol) below = std::max(below, c.value);
  return below < 0.0 ? 1.0 : 1.0 - below;
}

struct GenericParam {
  double value;       // eigenvalue of pqp on the generic part, in (0,1)
  int multiplicity;   // number of 2x2 blocks carrying this value
};

/// Halmos/Pedersen canonical form of a pair of projections.
///
/// In the basis given by `unitary`, the space splits as
///   (p∧q) ⊕ (p∧q⊥) ⊕ (p⊥∧q) ⊕ (p⊥∧q⊥) ⊕ (2x2 generic blocks),
/// with p = [[1,0],[0,0]] and q = [[t, s],[s, 1−t]] (s = sqrt(t(1−t)))
/// on each generic block.
struct TwoProjectionForm {
  Matrix unitary;
  int dim_meet = 0;
  int dim_p_only = 0;
  int dim_q_only = 0;
  int dim_neither = 0;
  std::vector<GenericParam> generic_params;

  int generic_blocks() const {
    int g = 0;
    for (const auto& gp : generic_params) g += gp.multiplicity;
    return g;
  }
  Eigen::Index ambient_dim() const {
    return dim_meet + dim_p_only + dim_q_only + dim_neither + 2 * generic_blocks();
  }
};

inline TwoProjectionForm canonical_form(const ProjectionMatrix& p,
                                        const ProjectionMatrix& q,
                                        const Tolerance& tol = Tolerance{}) {
  require_same_dim(p, q);
  const Eigen::Index n = p.dim();
  const double lo = tol.cluster_tol, hi = 1.0 - tol.cluster_tol;

  std::vector<Eigen::VectorXcd> meet_cols, p_only_cols, q_only_cols, neither_cols;
  std::vector<Eigen::VectorXcd> u_cols, w_cols;
  std::vector<double> t_vals;  // descending

  // Compress q to range(p): eigenvalues near 1 -> p∧q, near 0 -> p∧q⊥,
  // interior -> generic parameters t with p-side vector u.
  const Matrix pb = range_basis(p, tol);
  if (pb.cols() > 0) {
    const Matrix comp = pb.adjoint() * q.matrix() * pb;
    const HermitianSpectrum s = hermitian_eig((comp + comp.adjoint()) / 2.0, tol);
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
      const double t = s.eigenvalues(i);
      const Eigen::VectorXcd u = pb * s.eigenvectors.col(i);
      if (t >= hi) {
        meet_cols.push_back(u);
      } else if (t <= lo) {
        p_only_cols.push_back(u);
      } else {
        // Second leg of the generic block: w ∝ (q − t)u lies in range(p⊥).
        Eigen::VectorXcd w = q.matrix() * u - t * u;
        w /= w.norm();
        u_cols.push_back(u);
        w_cols.push_back(w);
        t_vals.push_back(t);
      }
    }
  }

  // Compress q to range(p⊥): eigenvalues near 1 -> p⊥∧q, near 0 -> p⊥∧q⊥.
  // Interior eigenvalues are the 1−t duplicates of the generic part.
  const Matrix cb = range_basis(p.complement(tol), tol);
  if (cb.cols() > 0) {
    const Matrix comp = cb.adjoint() * q.matrix() * cb;
    const HermitianSpectrum s = hermitian_eig((comp + comp.adjoint()) / 2.0, tol);
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
      const double v = s.eigenvalues(i);
      if (v >= hi)
        q_only_cols.push_back(cb * s.eigenvectors.col(i));
      else if (v <= lo)
        neither_cols.push_back(cb * s.eigenvectors.col(i));
    }
  }

  TwoProjectionForm form;
  form.dim_meet = static_cast<int>(meet_cols.size());
  form.dim_p_only = static_cast<int>(p_only_cols.size());
  form.dim_q_only = static_cast<int>(q_only_cols.size());
  form.dim_neither = static_cast<int>(neither_cols.size());

  Matrix u = Matrix(n, n);
  Eigen::Index col = 0;
  for (const auto& c : meet_cols) u.col(col++) = c;
  for (const auto& c : p_only_cols) u.col(col++) = c;
  for (const auto& c : q_only_cols) u.col(col++) = c;
  for (const auto& c : neither_cols) u.col(col++) = c;
  for (std::size_t k = 0; k < u_cols.size(); ++k) {
    u.col(col++) = u_cols[k];
    u.col(col++) = w_cols[k];
  }
  if (col != n)
    throw Error("canonical_form: block dimensions do not sum to ambient dimension");
  form.unitary = std::move(u);

  // t_vals are already descending; clustered reps keep the block order.
  if (!t_vals.empty()) {
    RealVector tv = Eigen::Map<const RealVector>(t_vals.data(),
                                                 static_cast<Eigen::Index>(t_vals.size()));
    for (const auto& c : cluster_eigenvalues(tv, tol.cluster_tol))
      form.generic_params.push_back({c.value, c.multiplicity});
  }
  return form;
}

/// Inverse of canonical_form: rebuild the pair from block data.
inline std::pair<ProjectionMatrix, ProjectionMatrix> reconstruct_pair(
    const TwoProjectionForm& form, const Tolerance& tol = Tolerance{}) {
  const Eigen::Index n = form.ambient_dim();
  if (n == 0) throw ValidationError("reconstruct_pair: ambient dimension is zero");
  if (form.dim_meet < 0 || form.dim_p_only < 0 || form.dim_q_only < 0 ||
      form.dim_neither < 0)
    throw ValidationError("reconstruct_pair: negative block dimension");
  if (form.unitary.rows() != n || form.unitary.cols() != n)
    throw ValidationError("reconstruct_pair: unitary size inconsistent with blocks");
  const double ortho = op_norm(form.unitary.adjoint() * form.unitary -
                               Matrix::Identity(n, n));
  if (ortho > 1e-8)
    throw ValidationError("reconstruct_pair: change of basis not unitary, residual " +
                          std::to_string(ortho));

  Matrix p0 = Matrix::Zero(n, n), q0 = Matrix::Zero(n, n);
  Eigen::Index i = 0;
  for (int k = 0; k < form.dim_meet; ++k, ++i) {
    p0(i, i) = 1.0;
    q0(i, i) = 1.0;
  }
  for (int k = 0; k < form.dim_p_only; ++k, ++i) p0(i, i) = 1.0;
  for (int k = 0; k < form.dim_q_only; ++k, ++i) q0(i, i) = 1.0;
  i += form.dim_neither;
  for (const auto& gp : form.generic_params) {
    if (!(gp.value > 0.0 && gp.value < 1.0))
      throw ValidationError("reconstruct_pair: generic parameter outside (0,1)");
    if (gp.multiplicity < 1)
      throw ValidationError("reconstruct_pair: generic multiplicity < 1");
    const double t = gp.value, s = std::sqrt(t * (1.0 - t));
    for (int k = 0; k < gp.multiplicity; ++k) {
      p0(i, i) = 1.0;
      q0(i, i) = t;
      q0(i, i + 1) = s;
      q0(i + 1, i) = s;
      q0(i + 1, i + 1) = 1.0 - t;
      i += 2;
    }
  }
  const Matrix p = form.unitary * p0 * form.unitary.adjoint();
  const Matrix q = form.unitary * q0 * form.unitary.adjoint();
  return {ProjectionMatrix((p + p.adjoint()) / 2.0, tol),
          ProjectionMatrix((q + q.adjoint()) / 2.0, tol)};
}

/// Planar pair: lines in C^2 meeting at angle theta, so c(p,q) = cos(theta).
inline std::pair<ProjectionMatrix, ProjectionMatrix> planar_pair(double theta) {
  Matrix p(2, 2), q(2, 2);
  p << 1, 0, 0, 0;
  const double c = std::cos(theta), s = std::sin(theta);
  q << c * c, c * s, c * s, s * s;
  return {ProjectionMatrix(std::move(p)), ProjectionMatrix(std::move(q))};
}

/// Near-degenerate pair from a rich spectrum: two projections r, s in
/// C*(p,q) whose angle is driven toward 1 by a ramp function peaking at a
/// cluster-point surrogate of the generic parameters.
struct BadPairResult {
  ProjectionMatrix r;
  ProjectionMatrix s;
  double c_rs;            // angle_c(s, r)
  double max_offpeak_f;   // largest ramp value below the peak; equals c_rs
  double peak_param;      // parameter where the ramp attains 1
};

inline BadPairResult bad_pair_from_spectrum(const ProjectionMatrix& p,
                                            const ProjectionMatrix& q,
                                            const Tolerance& tol = Tolerance{}) {
  const TwoProjectionForm form = canonical_form(p, q, tol);
  const std::size_t m = form.generic_params.size();
  if (m < 2)
    throw NotApplicableError(
        "bad_pair_from_spectrum: needs at least 2 distinct generic parameters, got " +
        std::to_string(m));

  std::vector<double> reps(m);
  for (std::size_t i = 0; i < m; ++i) reps[i] = form.generic_params[i].value;

  std::vector<double> sorted = reps;
  std::sort(sorted.begin(), sorted.end());
  const double median = (m % 2 == 1)
                            ? sorted[m / 2]
                            : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < m; ++i)
    if (std::abs(reps[i] - median) < std::abs(reps[peak] - median)) peak = i;

  double dmax = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    dmax = std::max(dmax, std::abs(reps[i] - reps[peak]));

  // Injective ramp: 1 at the peak, decreasing linearly with distance from it;
  // equal distances get a deterministic nudge.
  std::vector<double> f(m);
  for (std::size_t i = 0; i < m; ++i)
    f[i] = (i == peak) ? 1.0 : 1.0 - std::abs(reps[i] - reps[peak]) / (2.0 * dmax);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (i != peak && f[i] == f[j]) f[i] -= 1e-9 * static_cast<double>(i + 1);

  const Eigen::Index n = p.dim();
  const Eigen::Index offset =
      form.dim_meet + form.dim_p_only + form.dim_q_only + form.dim_neither;
  Matrix s0 = Matrix::Zero(n, n), r0 = Matrix::Zero(n, n);
  Eigen::Index pos = offset;
  for (std::size_t i = 0; i < m; ++i) {
    const double fi = f[i], gi = std::sqrt(std::max(0.0, 1.0 - fi * fi));
    for (int k = 0; k < form.generic_params[i].multiplicity; ++k) {
      s0(pos, pos) = 1.0;
      r0(pos, pos) = fi * fi;
      r0(pos, pos + 1) = fi * gi;
      r0(pos + 1, pos) = fi * gi;
      r0(pos + 1, pos + 1) = gi * gi;
      pos += 2;
    }
  }
  const Matrix su = form.unitary * s0 * form.unitary.adjoint();
  const Matrix ru = form.unitary * r0 * form.unitary.adjoint();

  BadPairResult out{ProjectionMatrix((ru + ru.adjoint()) / 2.0, tol),
                    ProjectionMatrix((su + su.adjoint()) / 2.0, tol),
                    0.0, 0.0, reps[peak]};
  for (std::size_t i = 0; i < m; ++i)
    if (i != peak) out.max_offpeak_f = std::max(out.max_offpeak_f, f[i]);
  out.c_rs = angle_c(out.s, out.r, tol);
  return out;
}

/// Truncation of the open-projection example: rank-one lines at angles 1/n,
/// n = 1..N, packed into a (2N+2)-dimensional space.  The pair has trivial
/// meet while c(p,q) = cos(1/N) creeps up to 1 as N grows.
struct TruncatedReport {
  int rank_p = 0;
  int rank_q = 0;
  int meet_rank = 0;
  double c_value = 0.0;
};

struct TruncatedCounterexample {
  ProjectionMatrix p;
  ProjectionMatrix q;
  TruncatedReport report;
};

inline TruncatedCounterexample truncated_counterexample(
    int truncation, const Tolerance& tol = Tolerance{}) {
  if (truncation < 2)
    throw ValidationError("truncated_counterexample: N must be >= 2");
  const Eigen::Index n = 2 * truncation + 2;
  Matrix p = Matrix::Zero(n, n), q = Matrix::Zero(n, n);
  for (int k = 1; k <= truncation; ++k) {
    const Eigen::Index a = 2 * k - 1;  // coordinate of xi_{2k}
    p(a, a) = 1.0;
    Eigen::VectorXcd eta = Eigen::VectorXcd::Zero(n);
    eta(a) = std::cos(1.0 / k);
    eta(a + 1) = std::sin(1.0 / k);
    q += eta * eta.adjoint();
  }
  TruncatedCounterexample out{ProjectionMatrix(std::move(p), tol),
                              ProjectionMatrix(std::move(q), tol),
                              {}};
  out.report.rank_p = out.p.rank();
  out.report.rank_q = out.q.rank();
  out.report.meet_rank = meet(out.p, out.q, tol).rank();
  out.report.c_value = angle_c(out.p, out.q, tol);
  return out;
}

}  // namespace projgeom

#endif  // PROJGEOM_TWO_PROJECTIONS_HPP
